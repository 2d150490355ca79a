#pragma once

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qcr/checkpoint.hpp"
#include "qcr/errors.hpp"

namespace qcr {

namespace detail {

/// Advisory single-writer lock on <root>/LOCK, released with the fd.
class WriterLock {
public:
    explicit WriterLock(const std::filesystem::path& root) {
        fd_ = ::open((root / "LOCK").c_str(), O_CREAT | O_RDWR, 0644);
        if (fd_ < 0) throw StorageIO("cannot open lock file in " + root.string());
        if (::flock(fd_, LOCK_EX) != 0) {
            ::close(fd_);
            throw StorageIO("cannot acquire store lock in " + root.string());
        }
    }
    ~WriterLock() {
        if (fd_ >= 0) {
            ::flock(fd_, LOCK_UN);
            ::close(fd_);
        }
    }
    WriterLock(const WriterLock&) = delete;
    WriterLock& operator=(const WriterLock&) = delete;

private:
    int fd_ = -1;
};

}  // namespace detail

/// Directory-backed checkpoint store: one `<id>.ckpt.json` file per
/// record, a LATEST pointer, atomic temp-write-then-rename publication.
class Store {
public:
    explicit Store(std::filesystem::path root) : root_(std::move(root)) {
        std::error_code ec;
        std::filesystem::create_directories(root_, ec);
        if (ec) throw StorageIO("cannot create store directory " + root_.string());
    }

    const std::filesystem::path& root() const { return root_; }

    std::filesystem::path path_for(const std::string& id) const {
        return root_ / (id + ".ckpt.json");
    }

    /// Validates, assigns the id, writes atomically, updates LATEST.
    /// Returns the checkpoint id.
    std::string put(CheckpointRecord record) {
        detail::WriterLock lock(root_);
        record = finalize_record(std::move(record));
        if (record.parent_id) {
            CheckpointRecord parent = [&] {
                try {
                    return get(*record.parent_id);
                } catch (const NotFound&) {
                    throw ParentMissing("parent checkpoint " + *record.parent_id + " not in store");
                }
            }();
            if (parent.program_digest != record.program_digest)
                throw ParentMissing("parent checkpoint belongs to a different program");
        }
        const std::string bytes = canonical_serialize(record);
        write_atomic(path_for(record.checkpoint_id), bytes);
        write_atomic(root_ / "LATEST", record.checkpoint_id + "\n");
        return record.checkpoint_id;
    }

    CheckpointRecord get(const std::string& id) const {
        auto p = path_for(id);
        std::ifstream in(p, std::ios::binary);
        if (!in) throw NotFound("checkpoint " + id + " not found in " + root_.string());
        std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        CheckpointRecord r = deserialize_record(bytes);
        if (r.checkpoint_id != id)
            throw DigestMismatch("file " + p.string() + " holds record " + r.checkpoint_id);
        return r;
    }

    std::optional<std::string> latest() const {
        std::ifstream in(root_ / "LATEST");
        if (!in) return std::nullopt;
        std::string id;
        std::getline(in, id);
        if (id.empty()) return std::nullopt;
        return id;
    }

    /// Follows parent links; returns ids in creation order, root first.
    std::vector<std::string> lineage(const std::string& id) const {
        std::vector<std::string> chain;
        std::set<std::string> seen;
        std::optional<std::string> cur = id;
        while (cur) {
            if (!seen.insert(*cur).second) throw StorageIO("lineage cycle at " + *cur);
            chain.push_back(*cur);
            cur = get(*cur).parent_id;
        }
        std::reverse(chain.begin(), chain.end());
        return chain;
    }

    std::vector<std::string> list() const {
        std::vector<std::string> ids;
        for (const auto& entry : std::filesystem::directory_iterator(root_)) {
            const std::string name = entry.path().filename().string();
            constexpr std::string_view suffix = ".ckpt.json";
            if (name.size() > suffix.size() && name.ends_with(suffix))
                ids.push_back(name.substr(0, name.size() - suffix.size()));
        }
        std::sort(ids.begin(), ids.end());
        return ids;
    }

    bool empty() const { return !latest().has_value(); }

    /// Test seam: runs between writing the temp file and publishing it,
    /// so crash-during-put behavior can be exercised deterministically.
    std::function<void(const std::filesystem::path& tmp)> pre_publish_hook;

private:
    void write_atomic(const std::filesystem::path& target, const std::string& bytes) {
        auto tmp = target;
        tmp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter_++);
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw StorageIO("cannot write " + tmp.string());
            out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
            if (!out) throw StorageIO("short write to " + tmp.string());
        }
        if (pre_publish_hook) pre_publish_hook(tmp);
        std::error_code ec;
        std::filesystem::rename(tmp, target, ec);
        if (ec) throw StorageIO("cannot publish " + target.string() + ": " + ec.message());
    }

    std::filesystem::path root_;
    unsigned long counter_ = 0;
};

}  // namespace qcr
