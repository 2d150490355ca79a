#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "qcr/runtime.hpp"

namespace qcr {

/// Qubit-reuse demo: two physical qubits carry a three-logical-qubit
/// GHZ-like chain by measuring, classicalizing the pre-reset bit, and
/// reusing the freed qubit. A classicalized checkpoint follows each
/// pre-reset measurement.
struct ReuseConfig {
    long shots = 16;
    std::uint64_t master_seed = 0;
    int num_physical_qubits = 2;  // extra qubits stay idle (size-bound studies)

    void validate() const {
        if (shots < 1) throw ConfigError("shots must be >= 1");
        if (num_physical_qubits < 2 || num_physical_qubits > 22)
            throw ConfigError("physical qubit count must be in [2,22]");
    }

    std::string program_text() const {
        std::string t = "qubits " + std::to_string(num_physical_qubits) + "\n";
        t += "creg out 3\n";
        t += "region chain\n";
        t += "h 0\n";
        t += "cx 0 1\n";
        t += "measure 0 -> out[0]\n";   // logical qubit 0 classicalized
        t += "ckpt classicalized\n";
        t += "reset 0\n";               // physical qubit 0 freed for reuse
        t += "cx 1 0\n";                // logical qubit 2 lives on physical 0
        t += "measure 1 -> out[1]\n";
        t += "ckpt classicalized\n";
        t += "measure 0 -> out[2]\n";
        return t;
    }

    std::string canonical_text() const {
        return "workload reuse\nshots " + std::to_string(shots) + "\nqubits " +
               std::to_string(num_physical_qubits) + "\nseed " + std::to_string(master_seed) + "\n";
    }
};

inline RunOutcome run_qubit_reuse_demo(const ReuseConfig& cfg, const Policy& policy, Store& store,
                                       std::optional<FailureSpec> failure = std::nullopt) {
    cfg.validate();
    auto parsed = parse_program(cfg.program_text());
    if (!parsed.ok()) throw ConfigError("generated reuse program failed to parse");
    ShotWorkloadConfig wcfg;
    wcfg.program = std::make_shared<const Program>(std::move(*parsed.program));
    wcfg.shots = cfg.shots;
    wcfg.master_seed = cfg.master_seed;
    wcfg.workload_name = "reuse";
    wcfg.metadata = {{"workload", "reuse"},
                     {"shots", std::to_string(cfg.shots)},
                     {"qubits", std::to_string(cfg.num_physical_qubits)},
                     {"seed", std::to_string(cfg.master_seed)}};
    ShotLoopEngine engine(wcfg, policy, store, std::move(failure));
    return engine.run();
}

inline RunOutcome resume_qubit_reuse_demo(const ReuseConfig& cfg, const CheckpointRecord& record,
                                          const Policy& policy, Store& store,
                                          std::optional<FailureSpec> failure = std::nullopt) {
    cfg.validate();
    auto parsed = parse_program(cfg.program_text());
    if (!parsed.ok()) throw ConfigError("generated reuse program failed to parse");
    ShotWorkloadConfig wcfg;
    wcfg.program = std::make_shared<const Program>(std::move(*parsed.program));
    wcfg.shots = cfg.shots;
    wcfg.master_seed = cfg.master_seed;
    wcfg.workload_name = "reuse";
    wcfg.metadata = record.calibration_metadata;  // keeps reschedule tags
    ShotLoopEngine engine(wcfg, policy, store, std::move(failure));
    return engine.resume_from(record);
}

}  // namespace qcr
