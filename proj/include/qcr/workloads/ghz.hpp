#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "qcr/runtime.hpp"

namespace qcr {

/// Constant-depth GHZ preparation over alternating data/ancilla qubits:
/// H on all data, CX pairs into the ancillas, ancilla measurement, then
/// feedforward X corrections keyed on ancilla-parity prefixes. The
/// classicalized checkpoint after the measurements stores the branch.
struct GhzConfig {
    int n = 3;  // GHZ width (data qubits); physical count is 2n-1
    long shots = 8;
    std::uint64_t master_seed = 0;

    void validate() const {
        if (n < 3 || n > 5) throw ConfigError("ghz prep supports n in [3,5]");
        if (shots < 1) throw ConfigError("shots must be >= 1");
    }

    int data_qubit(int j) const { return 2 * j; }
    int ancilla_qubit(int i) const { return 2 * i + 1; }

    std::string program_text() const {
        std::string t = "qubits " + std::to_string(2 * n - 1) + "\n";
        t += "creg anc " + std::to_string(n - 1) + "\n";
        t += "region prep\n";
        for (int j = 0; j < n; ++j) t += "h " + std::to_string(data_qubit(j)) + "\n";
        for (int i = 0; i + 1 < n; ++i) {
            t += "cx " + std::to_string(data_qubit(i)) + " " + std::to_string(ancilla_qubit(i)) + "\n";
            t += "cx " + std::to_string(data_qubit(i + 1)) + " " + std::to_string(ancilla_qubit(i)) +
                 "\n";
        }
        for (int i = 0; i + 1 < n; ++i)
            t += "measure " + std::to_string(ancilla_qubit(i)) + " -> anc[" + std::to_string(i) +
                 "]\n";
        t += "ckpt classicalized\n";
        t += "region correct\n";
        // Data qubit j flips iff anc[0] ^ ... ^ anc[j-1] is 1; the parity
        // is realized as a chain of single-bit guards.
        for (int j = 1; j < n; ++j)
            for (int i = 0; i < j; ++i)
                t += "if anc[" + std::to_string(i) + "] == 1: x " + std::to_string(data_qubit(j)) +
                     "\n";
        return t;
    }

    std::string canonical_text() const {
        return "workload ghz\nn " + std::to_string(n) + "\nshots " + std::to_string(shots) +
               "\nseed " + std::to_string(master_seed) + "\n";
    }
};

/// |<GHZ_n|psi_data>|^2 with the measured ancillas projected out.
inline double ghz_fidelity(const GhzConfig& cfg, const StateVector& state,
                           const Registers& registers) {
    const auto& anc = registers.at("anc");
    auto index_for = [&](int data_bit) {
        std::size_t idx = 0;
        for (int j = 0; j < cfg.n; ++j)
            if (data_bit) idx |= std::size_t{1} << cfg.data_qubit(j);
        for (int i = 0; i + 1 < cfg.n; ++i)
            if (anc[static_cast<std::size_t>(i)]) idx |= std::size_t{1} << cfg.ancilla_qubit(i);
        return idx;
    };
    cplx overlap = (state.amplitude(index_for(0)) + state.amplitude(index_for(1))) /
                   std::sqrt(2.0);
    return std::norm(overlap);
}

struct GhzOutcome {
    RunOutcome run;
    std::vector<double> fidelities;  // per completed shot
};

namespace detail {

/// Per-shot fidelities are derived classical data; they ride in the
/// record's parameter vector so resumed runs report the same values
/// without re-executing completed shots.
struct GhzHarness {
    GhzConfig cfg;
    std::shared_ptr<std::vector<double>> fidelities = std::make_shared<std::vector<double>>();
    ShotWorkloadConfig wcfg;
    WorkloadHooks hooks;

    explicit GhzHarness(const GhzConfig& c) : cfg(c) {
        cfg.validate();
        auto parsed = parse_program(cfg.program_text());
        if (!parsed.ok()) throw ConfigError("generated ghz program failed to parse");
        wcfg.program = std::make_shared<const Program>(std::move(*parsed.program));
        wcfg.shots = cfg.shots;
        wcfg.master_seed = cfg.master_seed;
        wcfg.workload_name = "ghz";
        wcfg.metadata = {{"workload", "ghz"},
                         {"n", std::to_string(cfg.n)},
                         {"shots", std::to_string(cfg.shots)},
                         {"seed", std::to_string(cfg.master_seed)}};
        auto fids = fidelities;
        auto c2 = cfg;
        hooks.on_shot_complete = [c2, fids](const ShotContext& ctx) {
            fids->push_back(ghz_fidelity(c2, ctx.state, ctx.registers));
        };
        hooks.enrich_record = [fids](CheckpointRecord& r, const Boundary*) {
            r.parameters = *fids;
        };
    }

    GhzOutcome finish(RunOutcome run) const {
        GhzOutcome out{std::move(run), *fidelities};
        nlohmann::json& r = out.run.report.result;
        double min_f = 1.0;
        for (double f : out.fidelities) min_f = std::min(min_f, f);
        r["fidelities"] = out.fidelities;
        r["min_fidelity"] = out.fidelities.empty() ? 0.0 : min_f;
        return out;
    }
};

}  // namespace detail

inline GhzOutcome run_ghz_prep(const GhzConfig& cfg, const Policy& policy, Store& store,
                               std::optional<FailureSpec> failure = std::nullopt) {
    detail::GhzHarness h(cfg);
    ShotLoopEngine engine(h.wcfg, policy, store, std::move(failure), h.hooks);
    return h.finish(engine.run());
}

inline GhzOutcome resume_ghz_prep(const GhzConfig& cfg, const CheckpointRecord& record,
                                  const Policy& policy, Store& store,
                                  std::optional<FailureSpec> failure = std::nullopt) {
    detail::GhzHarness h(cfg);
    if (record.parameters.size() != static_cast<std::size_t>(record.shot_cursor.completed_shots))
        throw SchemaError("ghz checkpoint fidelity history has unexpected length");
    *h.fidelities = record.parameters;
    h.wcfg.metadata = record.calibration_metadata;  // keeps reschedule tags
    ShotLoopEngine engine(h.wcfg, policy, store, std::move(failure), h.hooks);
    return h.finish(engine.resume_from(record));
}

}  // namespace qcr
