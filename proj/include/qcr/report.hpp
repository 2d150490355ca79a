#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcr/checkpoint.hpp"
#include "qcr/executor.hpp"
#include "qcr/sha256.hpp"

namespace qcr {

/// What one run produced. `result` holds the workload outputs and is
/// bit-identical between an uninterrupted run and a killed+resumed one;
/// the execution fields describe how this particular process got there.
struct RunReport {
    std::string workload;
    std::uint64_t master_seed = 0;
    bool resumed = false;
    std::string resumed_from;

    nlohmann::json result = nlohmann::json::object();

    std::vector<std::string> checkpoint_ids;
    struct Failure {
        std::string kind;
        std::string position;
        std::string action;
    };
    std::vector<Failure> failures;
    bool injected_failure_hit = false;

    long shots_executed = 0;
    long shots_replayed = 0;
    long iterations_executed = 0;

    struct CheckpointTiming {
        std::string id;
        double create_ms = 0;
    };
    std::vector<CheckpointTiming> checkpoint_timings;
    double restore_ms = 0;
    double total_ms = 0;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["workload"] = workload;
        j["master_seed"] = std::to_string(master_seed);
        j["resumed"] = resumed;
        if (resumed) j["resumed_from"] = resumed_from;
        j["result"] = result;
        j["checkpoints"] = checkpoint_ids;
        nlohmann::json fails = nlohmann::json::array();
        for (const auto& f : failures)
            fails.push_back({{"kind", f.kind}, {"position", f.position}, {"action", f.action}});
        j["failures"] = fails;
        j["injected_failure_hit"] = injected_failure_hit;
        j["counts"] = {{"shots_executed", shots_executed},
                       {"shots_replayed", shots_replayed},
                       {"iterations_executed", iterations_executed}};
        nlohmann::json timings = nlohmann::json::array();
        for (const auto& t : checkpoint_timings)
            timings.push_back({{"id", t.id}, {"create_ms", t.create_ms}});
        j["timing"] = {{"checkpoint_create_ms", timings},
                       {"restore_ms", restore_ms},
                       {"total_ms", total_ms}};
        return j;
    }
};

/// Registers formatted as "name=bits;name=bits" with bit 0 leftmost.
inline std::string registers_key(const Registers& regs) {
    std::string key;
    for (const auto& [name, bits] : regs) {
        if (!key.empty()) key.push_back(';');
        key += name;
        key.push_back('=');
        for (auto b : bits) key.push_back(b ? '1' : '0');
    }
    return key;
}

/// Canonical digest of a transcript, used to compare whole executions.
inline std::string transcript_digest(const Transcript& transcript) {
    std::string bytes;
    bytes.push_back('[');
    for (std::size_t i = 0; i < transcript.size(); ++i) {
        const auto& ev = transcript[i];
        if (i) bytes.push_back(',');
        bytes += "{\"forced\":";
        bytes += ev.forced ? "true" : "false";
        bytes += ",\"op_index\":" + std::to_string(ev.op_index);
        bytes += ",\"outcome\":" + std::to_string(ev.outcome);
        bytes += ",\"qubit\":" + std::to_string(ev.qubit);
        bytes += ",\"shot_index\":" + std::to_string(ev.shot_index) + "}";
    }
    bytes.push_back(']');
    return sha256_hex(bytes);
}

}  // namespace qcr
