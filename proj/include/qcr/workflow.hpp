#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "qcr/runtime.hpp"
#include "qcr/workloads/falqon.hpp"
#include "qcr/workloads/ghz.hpp"
#include "qcr/workloads/repcode.hpp"
#include "qcr/workloads/reuse.hpp"
#include "qcr/workloads/vqe.hpp"

namespace qcr {

/// A user-supplied dynamic-circuit program run for a number of shots.
struct ProgramWorkload {
    std::string source_text;
    long shots = 1;
    std::uint64_t master_seed = 0;

    std::shared_ptr<const Program> parse_or_throw() const {
        auto r = parse_program(source_text);
        if (!r.ok()) {
            std::string msg = "program failed to parse/validate";
            for (const auto& d : r.diagnostics)
                msg += "\n  line " + std::to_string(d.line) + ":" + std::to_string(d.column) +
                       ": " + d.message;
            throw ConfigError(msg);
        }
        return std::make_shared<const Program>(std::move(*r.program));
    }
};

using WorkloadConfig =
    std::variant<ProgramWorkload, VqeConfig, FalqonConfig, GhzConfig, ReuseConfig, RepcodeConfig>;

namespace detail {

inline std::string meta_get(const std::map<std::string, std::string>& m, const std::string& key) {
    auto it = m.find(key);
    if (it == m.end()) throw SchemaError("checkpoint metadata missing '" + key + "'");
    return it->second;
}

inline long meta_long(const std::map<std::string, std::string>& m, const std::string& key) {
    auto v = parse_int(meta_get(m, key));
    if (!v) throw SchemaError("checkpoint metadata field '" + key + "' is not an integer");
    return *v;
}

inline double meta_real(const std::map<std::string, std::string>& m, const std::string& key) {
    auto v = parse_real(meta_get(m, key));
    if (!v) throw SchemaError("checkpoint metadata field '" + key + "' is not a real");
    return *v;
}

inline std::uint64_t meta_seed(const std::map<std::string, std::string>& m) {
    const std::string s = meta_get(m, "seed");
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw SchemaError("checkpoint metadata field 'seed' is not a 64-bit value");
    return v;
}

}  // namespace detail

inline RunOutcome run_program_workload(const ProgramWorkload& w, const Policy& policy, Store& store,
                                       std::optional<FailureSpec> failure = std::nullopt) {
    ShotWorkloadConfig cfg;
    cfg.program = w.parse_or_throw();
    cfg.shots = w.shots;
    cfg.master_seed = w.master_seed;
    cfg.workload_name = "program";
    cfg.metadata = {{"workload", "program"},
                    {"shots", std::to_string(w.shots)},
                    {"seed", std::to_string(w.master_seed)}};
    ShotLoopEngine engine(cfg, policy, store, std::move(failure));
    return engine.run();
}

inline RunOutcome resume_program_workload(const ProgramWorkload& w, const CheckpointRecord& record,
                                          const Policy& policy, Store& store,
                                          std::optional<FailureSpec> failure = std::nullopt) {
    ShotWorkloadConfig cfg;
    cfg.program = w.parse_or_throw();
    cfg.shots = record.calibration_metadata.count("shots")
                    ? detail::meta_long(record.calibration_metadata, "shots")
                    : w.shots;
    cfg.master_seed = record.master_seed;
    cfg.workload_name = "program";
    cfg.metadata = record.calibration_metadata;
    ShotLoopEngine engine(cfg, policy, store, std::move(failure));
    return engine.resume_from(record);
}

/// Runs any workload from scratch under the given policy and store.
inline RunOutcome run_workflow(const WorkloadConfig& workload, const Policy& policy, Store& store,
                               std::optional<FailureSpec> failure = std::nullopt) {
    return std::visit(
        [&](const auto& cfg) -> RunOutcome {
            using T = std::decay_t<decltype(cfg)>;
            if constexpr (std::is_same_v<T, ProgramWorkload>)
                return run_program_workload(cfg, policy, store, failure);
            else if constexpr (std::is_same_v<T, VqeConfig>)
                return run_vqe(cfg, policy, store, failure);
            else if constexpr (std::is_same_v<T, FalqonConfig>)
                return run_falqon(cfg, policy, store, failure);
            else if constexpr (std::is_same_v<T, GhzConfig>)
                return run_ghz_prep(cfg, policy, store, failure).run;
            else if constexpr (std::is_same_v<T, ReuseConfig>)
                return run_qubit_reuse_demo(cfg, policy, store, failure);
            else
                return run_repetition_code(cfg, policy, store, failure).run;
        },
        workload);
}

/// Rebuilds the workload configuration a checkpoint was cut from.
/// Program workloads need the source text re-supplied by the caller.
inline WorkloadConfig workload_from_record(const CheckpointRecord& record,
                                           const std::optional<std::string>& program_text) {
    const auto& m = record.calibration_metadata;
    const std::string kind = detail::meta_get(m, "workload");
    if (kind == "program") {
        if (!program_text) throw ConfigError("resuming a program workload requires the program source");
        ProgramWorkload w;
        w.source_text = *program_text;
        w.shots = detail::meta_long(m, "shots");
        w.master_seed = record.master_seed;
        return w;
    }
    if (kind == "vqe") {
        VqeConfig c;
        c.hamiltonian = parse_pauli_sum(detail::meta_get(m, "ham"));
        c.num_qubits = static_cast<int>(detail::meta_long(m, "qubits"));
        c.depth = static_cast<int>(detail::meta_long(m, "depth"));
        c.learning_rate = detail::meta_real(m, "lr");
        c.max_iterations = detail::meta_long(m, "iters");
        c.tolerance = detail::meta_real(m, "tol");
        c.initial_parameter = detail::meta_real(m, "init");
        c.master_seed = detail::meta_seed(m);
        return c;
    }
    if (kind == "falqon") {
        FalqonConfig c;
        c.hp = parse_pauli_sum(detail::meta_get(m, "hp"));
        c.hd = parse_pauli_sum(detail::meta_get(m, "hd"));
        c.num_qubits = static_cast<int>(detail::meta_long(m, "qubits"));
        c.dt = detail::meta_real(m, "dt");
        c.steps = detail::meta_long(m, "steps");
        return c;
    }
    if (kind == "ghz") {
        GhzConfig c;
        c.n = static_cast<int>(detail::meta_long(m, "n"));
        c.shots = detail::meta_long(m, "shots");
        c.master_seed = detail::meta_seed(m);
        return c;
    }
    if (kind == "reuse") {
        ReuseConfig c;
        c.shots = detail::meta_long(m, "shots");
        c.num_physical_qubits = static_cast<int>(detail::meta_long(m, "qubits"));
        c.master_seed = detail::meta_seed(m);
        return c;
    }
    if (kind == "repcode") {
        RepcodeConfig c;
        c.rounds = detail::meta_long(m, "rounds");
        const std::string inj = detail::meta_get(m, "inject");
        if (inj != "none") {
            auto colon = inj.find(':');
            if (colon == std::string::npos) throw SchemaError("bad inject metadata");
            auto r = detail::parse_int(inj.substr(0, colon));
            auto q = detail::parse_int(inj.substr(colon + 1));
            if (!r || !q) throw SchemaError("bad inject metadata");
            c.injected_error = {*r, static_cast<int>(*q)};
        }
        c.master_seed = detail::meta_seed(m);
        return c;
    }
    throw SchemaError("unknown workload kind '" + kind + "' in checkpoint metadata");
}

/// Resumes whatever workload the record belongs to, continuing its
/// checkpoint chain in the same store.
inline RunOutcome resume_workflow(const CheckpointRecord& record, const Policy& policy,
                                  Store& store,
                                  const std::optional<std::string>& program_text = std::nullopt,
                                  std::optional<FailureSpec> failure = std::nullopt) {
    WorkloadConfig workload = workload_from_record(record, program_text);
    return std::visit(
        [&](const auto& cfg) -> RunOutcome {
            using T = std::decay_t<decltype(cfg)>;
            if constexpr (std::is_same_v<T, ProgramWorkload>)
                return resume_program_workload(cfg, record, policy, store, failure);
            else if constexpr (std::is_same_v<T, VqeConfig>)
                return resume_vqe(cfg, record, policy, store, failure);
            else if constexpr (std::is_same_v<T, FalqonConfig>)
                return resume_falqon(cfg, record, policy, store, failure);
            else if constexpr (std::is_same_v<T, GhzConfig>)
                return resume_ghz_prep(cfg, record, policy, store, failure).run;
            else if constexpr (std::is_same_v<T, ReuseConfig>)
                return resume_qubit_reuse_demo(cfg, record, policy, store, failure);
            else
                return resume_repetition_code(cfg, record, policy, store, failure).run;
        },
        workload);
}

}  // namespace qcr
