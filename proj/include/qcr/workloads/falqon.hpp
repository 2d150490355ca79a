#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "qcr/runtime.hpp"
#include "qcr/workloads/pauli.hpp"

namespace qcr {

/// Feedback-based optimization: layer k applies exp(-i*Hp*dt) then
/// exp(-i*beta_k*Hd*dt); the next beta comes from measuring the
/// commutator, beta_{k+1} = -<i[Hd,Hp]>, with beta_1 = 0.
struct FalqonConfig {
    PauliSum hp;  // problem Hamiltonian
    PauliSum hd;  // driver Hamiltonian
    int num_qubits = 2;
    double dt = 0.01;
    long steps = 50;

    void validate() const {
        if (num_qubits < 1 || num_qubits > 3) throw ConfigError("falqon supports 1..3 qubits");
        if (dt <= 0) throw ConfigError("dt must be > 0");
        if (steps < 1) throw ConfigError("steps must be >= 1");
        validate_pauli_sum(hp, num_qubits);
        validate_pauli_sum(hd, num_qubits);
    }

    std::string canonical_text() const {
        return "workload falqon\nhp " + format_pauli_sum(hp) + "\nhd " + format_pauli_sum(hd) +
               "\nqubits " + std::to_string(num_qubits) + "\ndt " + detail::format_double(dt) +
               "\nsteps " + std::to_string(steps) + "\n";
    }
};

/// Adaptive-ansatz state. The quantum state is reconstructed from the
/// stored beta history by re-executing the layers, never stored.
struct FalqonState {
    std::vector<double> betas;     // beta_k actually applied at layer k
    std::vector<double> feedback;  // v_k = <i[Hd,Hp]> measured after layer k
    std::vector<double> energies;  // <Hp> after layer k
    StateVector psi{1};

    std::vector<double> pack() const {
        std::vector<double> out = betas;
        out.insert(out.end(), feedback.begin(), feedback.end());
        out.insert(out.end(), energies.begin(), energies.end());
        return out;
    }
};

inline StateVector falqon_initial_state(const FalqonConfig& cfg) {
    StateVector psi(cfg.num_qubits);
    for (int q = 0; q < cfg.num_qubits; ++q) {
        const int qq[1] = {q};
        psi.apply_gate("h", qq, {});
    }
    return psi;
}

inline void falqon_apply_layer(const FalqonConfig& cfg, StateVector& psi, double beta) {
    apply_exp_pauli_sum(psi, cfg.hp, cfg.dt);
    if (beta != 0.0) apply_exp_pauli_sum(psi, cfg.hd, beta * cfg.dt);
}

/// Controlled re-execution: rebuild the layer-k state from recorded betas
/// without re-measuring any feedback.
inline FalqonState falqon_rehydrate(const FalqonConfig& cfg, const std::vector<double>& params,
                                    long iteration) {
    const std::size_t k = static_cast<std::size_t>(iteration);
    if (params.size() != 3 * k) throw SchemaError("falqon checkpoint parameters have unexpected length");
    FalqonState s;
    s.betas.assign(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(k));
    s.feedback.assign(params.begin() + static_cast<std::ptrdiff_t>(k),
                      params.begin() + static_cast<std::ptrdiff_t>(2 * k));
    s.energies.assign(params.begin() + static_cast<std::ptrdiff_t>(2 * k), params.end());
    s.psi = falqon_initial_state(cfg);
    for (double beta : s.betas) falqon_apply_layer(cfg, s.psi, beta);
    return s;
}

inline IterationDriver make_falqon_driver(const FalqonConfig& cfg,
                                          std::shared_ptr<FalqonState> state) {
    const PauliSum commutator = commutator_i(cfg.hd, cfg.hp);
    IterationDriver d;
    d.workload_name = "falqon";
    d.config_text = cfg.canonical_text();
    d.metadata = {{"workload", "falqon"},
                  {"hp", format_pauli_sum(cfg.hp)},
                  {"hd", format_pauli_sum(cfg.hd)},
                  {"qubits", std::to_string(cfg.num_qubits)},
                  {"dt", detail::format_double(cfg.dt)},
                  {"steps", std::to_string(cfg.steps)}};
    d.max_iterations = cfg.steps;
    d.step = [cfg, state, commutator](long k) {
        const double beta = k == 1 ? 0.0 : -state->feedback.back();
        falqon_apply_layer(cfg, state->psi, beta);
        const double v = expectation(state->psi, commutator);
        const double e = expectation(state->psi, cfg.hp);
        state->betas.push_back(beta);
        state->feedback.push_back(v);
        state->energies.push_back(e);
        return e;
    };
    d.snapshot = [state] { return state->pack(); };
    d.should_stop = nullptr;  // fixed layer budget
    d.finalize = [state](nlohmann::json& result, bool, long iterations) {
        result["layers"] = iterations;
        result["betas"] = state->betas;
        result["feedback"] = state->feedback;
    };
    return d;
}

inline RunOutcome run_falqon(const FalqonConfig& cfg, const Policy& policy, Store& store,
                             std::optional<FailureSpec> failure = std::nullopt) {
    cfg.validate();
    auto state = std::make_shared<FalqonState>();
    state->psi = falqon_initial_state(cfg);
    IterationEngine engine(make_falqon_driver(cfg, state), policy, store, std::move(failure));
    return engine.run();
}

inline RunOutcome resume_falqon(const FalqonConfig& cfg, const CheckpointRecord& record,
                                const Policy& policy, Store& store,
                                std::optional<FailureSpec> failure = std::nullopt) {
    cfg.validate();
    auto t0 = std::chrono::steady_clock::now();
    auto plan = plan_restoration_algorithmic(record, sha256_hex(cfg.canonical_text()));
    auto state = std::make_shared<FalqonState>(
        falqon_rehydrate(cfg, plan.parameters, plan.iteration));
    double restore_ms = detail::ms_since(t0);
    IterationDriver driver = make_falqon_driver(cfg, state);
    driver.metadata = record.calibration_metadata;  // keeps reschedule tags
    IterationEngine engine(std::move(driver), policy, store, std::move(failure));
    return engine.resume_from(record, state->energies, restore_ms);
}

}  // namespace qcr
