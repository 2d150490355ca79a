#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "qcr/store.hpp"

using namespace qcr;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("qcr_store_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

CheckpointRecord make_record(const std::string& program_digest, long iteration) {
    CheckpointRecord r;
    r.ckpt_class = CheckpointClass::Algorithmic;
    r.program_digest = program_digest;
    r.iteration = iteration;
    r.parameters = {0.5 * static_cast<double>(iteration)};
    r.shot_cursor = {0, 0, std::nullopt};
    return r;
}

const std::string kDigest = sha256_hex("some program");

}  // namespace

TEST_CASE("put then get returns an equal record") {
    TempDir dir;
    Store store(dir.path);
    auto id = store.put(make_record(kDigest, 1));
    auto back = store.get(id);
    CHECK(back.checkpoint_id == id);
    CHECK(back.iteration == 1);
    CHECK(back.program_digest == kDigest);
    CHECK(store.latest() == id);
    CHECK(fs::exists(store.path_for(id)));
}

TEST_CASE("get on empty store is NotFound") {
    TempDir dir;
    Store store(dir.path);
    CHECK(store.empty());
    CHECK(store.latest() == std::nullopt);
    CHECK_THROWS_AS(store.get(std::string(64, 'b')), NotFound);
}

TEST_CASE("lineage follows parent links in creation order") {
    TempDir dir;
    Store store(dir.path);
    auto id1 = store.put(make_record(kDigest, 1));
    auto r2 = make_record(kDigest, 2);
    r2.parent_id = id1;
    auto id2 = store.put(r2);
    auto r3 = make_record(kDigest, 3);
    r3.parent_id = id2;
    auto id3 = store.put(r3);

    auto chain = store.lineage(id3);
    REQUIRE(chain.size() == 3);
    CHECK(chain[0] == id1);
    CHECK(chain[1] == id2);
    CHECK(chain[2] == id3);
    CHECK(store.latest() == id3);
    CHECK(store.list().size() == 3);
}

TEST_CASE("missing parent is rejected") {
    TempDir dir;
    Store store(dir.path);
    auto r = make_record(kDigest, 1);
    r.parent_id = std::string(64, 'c');
    CHECK_THROWS_AS(store.put(r), ParentMissing);
}

TEST_CASE("parent from another program is rejected") {
    TempDir dir;
    Store store(dir.path);
    auto id1 = store.put(make_record(kDigest, 1));
    auto r = make_record(sha256_hex("a different program"), 2);
    r.parent_id = id1;
    CHECK_THROWS_AS(store.put(r), ParentMissing);
}

TEST_CASE("a put interrupted before publication leaves the store unchanged") {
    TempDir dir;
    Store store(dir.path);
    auto id1 = store.put(make_record(kDigest, 1));

    struct Crash {};
    store.pre_publish_hook = [](const fs::path&) { throw Crash{}; };
    auto r2 = make_record(kDigest, 2);
    r2.parent_id = id1;
    CHECK_THROWS_AS(store.put(r2), Crash);

    // Visible contents unchanged: latest still id1, only one record listed.
    store.pre_publish_hook = nullptr;
    CHECK(store.latest() == id1);
    CHECK(store.list().size() == 1);
    // The interrupted temp file does not disturb later operation.
    auto id2 = store.put(r2);
    CHECK(store.latest() == id2);
    CHECK(store.lineage(id2).size() == 2);
}

TEST_CASE("corrupted record file fails closed") {
    TempDir dir;
    Store store(dir.path);
    auto id = store.put(make_record(kDigest, 1));
    {
        std::fstream f(store.path_for(id), std::ios::in | std::ios::out | std::ios::binary);
        f.seekp(120);
        f.put('X');
    }
    CHECK_THROWS(store.get(id));
}

TEST_CASE("store ignores stray files when listing") {
    TempDir dir;
    Store store(dir.path);
    store.put(make_record(kDigest, 1));
    std::ofstream(dir.path / "notes.txt") << "not a checkpoint";
    CHECK(store.list().size() == 1);
}
