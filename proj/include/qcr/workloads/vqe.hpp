#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "qcr/runtime.hpp"
#include "qcr/workloads/pauli.hpp"

namespace qcr {

/// Variational eigensolver on a hardware-efficient ansatz: per layer, RY
/// rotations on every qubit followed by a CX chain. Gradients via the
/// parameter-shift rule, plain gradient descent, exact expectations.
struct VqeConfig {
    PauliSum hamiltonian;
    int num_qubits = 2;
    int depth = 1;
    double learning_rate = 0.2;
    long max_iterations = 200;
    double tolerance = 1e-9;
    double initial_parameter = 0.1;
    std::uint64_t master_seed = 0;  // recorded; the optimizer itself is deterministic

    int num_parameters() const { return num_qubits * depth; }

    void validate() const {
        if (num_qubits < 1 || num_qubits > 4) throw ConfigError("vqe supports 1..4 qubits");
        if (depth < 1) throw ConfigError("ansatz depth must be >= 1");
        if (max_iterations < 1) throw ConfigError("max iterations must be >= 1");
        if (learning_rate <= 0) throw ConfigError("learning rate must be > 0");
        if (tolerance <= 0) throw ConfigError("tolerance must be > 0");
        validate_pauli_sum(hamiltonian, num_qubits);
    }

    std::string canonical_text() const {
        return "workload vqe\nham " + format_pauli_sum(hamiltonian) + "\nqubits " +
               std::to_string(num_qubits) + "\ndepth " + std::to_string(depth) + "\nlr " +
               detail::format_double(learning_rate) + "\niters " + std::to_string(max_iterations) +
               "\ntol " + detail::format_double(tolerance) + "\ninit " +
               detail::format_double(initial_parameter) + "\nseed " +
               std::to_string(master_seed) + "\n";
    }
};

inline StateVector vqe_ansatz_state(const VqeConfig& cfg, const std::vector<double>& theta) {
    StateVector state(cfg.num_qubits);
    std::size_t p = 0;
    for (int layer = 0; layer < cfg.depth; ++layer) {
        for (int q = 0; q < cfg.num_qubits; ++q) {
            const int qq[1] = {q};
            const double pp[1] = {theta[p++]};
            state.apply_gate("ry", qq, pp);
        }
        for (int q = 0; q + 1 < cfg.num_qubits; ++q) {
            const int qq[2] = {q, q + 1};
            state.apply_gate("cx", qq, {});
        }
    }
    return state;
}

inline double vqe_energy(const VqeConfig& cfg, const std::vector<double>& theta) {
    StateVector state = vqe_ansatz_state(cfg, theta);
    return expectation(state, cfg.hamiltonian);
}

/// Parameter-shift gradient: dE/dt_i = (E(t + pi/2 e_i) - E(t - pi/2 e_i)) / 2.
inline std::vector<double> vqe_gradient(const VqeConfig& cfg, const std::vector<double>& theta) {
    std::vector<double> grad(theta.size(), 0.0);
    std::vector<double> shifted = theta;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        shifted[i] = theta[i] + std::numbers::pi / 2;
        double plus = vqe_energy(cfg, shifted);
        shifted[i] = theta[i] - std::numbers::pi / 2;
        double minus = vqe_energy(cfg, shifted);
        shifted[i] = theta[i];
        grad[i] = (plus - minus) / 2.0;
    }
    return grad;
}

/// Live optimizer state; checkpoints pack it as theta ++ energy history.
struct VqeState {
    std::vector<double> theta;
    std::vector<double> energies;

    std::vector<double> pack() const {
        std::vector<double> out = theta;
        out.insert(out.end(), energies.begin(), energies.end());
        return out;
    }

    static VqeState unpack(const VqeConfig& cfg, const std::vector<double>& params,
                           long iteration) {
        const std::size_t dim = static_cast<std::size_t>(cfg.num_parameters());
        if (params.size() != dim + static_cast<std::size_t>(iteration))
            throw SchemaError("vqe checkpoint parameters have unexpected length");
        VqeState s;
        s.theta.assign(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(dim));
        s.energies.assign(params.begin() + static_cast<std::ptrdiff_t>(dim), params.end());
        return s;
    }
};

inline IterationDriver make_vqe_driver(const VqeConfig& cfg, std::shared_ptr<VqeState> state) {
    IterationDriver d;
    d.workload_name = "vqe";
    d.config_text = cfg.canonical_text();
    d.metadata = {{"workload", "vqe"},
                  {"ham", format_pauli_sum(cfg.hamiltonian)},
                  {"qubits", std::to_string(cfg.num_qubits)},
                  {"depth", std::to_string(cfg.depth)},
                  {"lr", detail::format_double(cfg.learning_rate)},
                  {"iters", std::to_string(cfg.max_iterations)},
                  {"tol", detail::format_double(cfg.tolerance)},
                  {"init", detail::format_double(cfg.initial_parameter)},
                  {"seed", std::to_string(cfg.master_seed)}};
    d.max_iterations = cfg.max_iterations;
    d.step = [cfg, state](long) {
        double e = vqe_energy(cfg, state->theta);
        auto grad = vqe_gradient(cfg, state->theta);
        for (std::size_t i = 0; i < grad.size(); ++i)
            state->theta[i] -= cfg.learning_rate * grad[i];
        state->energies.push_back(e);
        return e;
    };
    d.snapshot = [state] { return state->pack(); };
    // Must be decidable from checkpointable state alone, so resumed runs
    // stop exactly where uninterrupted ones would.
    d.should_stop = [cfg, state](long k) {
        const auto& e = state->energies;
        if (k >= 2 && e.size() >= 2 && std::abs(e[e.size() - 1] - e[e.size() - 2]) < cfg.tolerance)
            return true;
        auto grad = vqe_gradient(cfg, state->theta);
        double gmax = 0;
        for (double g : grad) gmax = std::max(gmax, std::abs(g));
        return gmax < 1e-12;  // stationary point
    };
    d.finalize = [cfg, state](nlohmann::json& result, bool converged, long iterations) {
        result["converged"] = converged;
        result["iterations"] = iterations;
        result["final_parameters"] = state->theta;
        result["non_convergence"] = !converged && iterations >= cfg.max_iterations;
    };
    return d;
}

/// Fresh VQE run with initial parameters from the config.
inline RunOutcome run_vqe(const VqeConfig& cfg, const Policy& policy, Store& store,
                          std::optional<FailureSpec> failure = std::nullopt) {
    cfg.validate();
    auto state = std::make_shared<VqeState>();
    state->theta.assign(static_cast<std::size_t>(cfg.num_parameters()), cfg.initial_parameter);
    IterationEngine engine(make_vqe_driver(cfg, state), policy, store, std::move(failure));
    return engine.run();
}

inline RunOutcome resume_vqe(const VqeConfig& cfg, const CheckpointRecord& record,
                             const Policy& policy, Store& store,
                             std::optional<FailureSpec> failure = std::nullopt) {
    cfg.validate();
    auto t0 = std::chrono::steady_clock::now();
    auto plan = plan_restoration_algorithmic(record, sha256_hex(cfg.canonical_text()));
    auto state = std::make_shared<VqeState>(VqeState::unpack(cfg, plan.parameters, plan.iteration));
    double restore_ms = detail::ms_since(t0);
    IterationDriver driver = make_vqe_driver(cfg, state);
    driver.metadata = record.calibration_metadata;  // keeps reschedule tags
    IterationEngine engine(std::move(driver), policy, store, std::move(failure));
    return engine.resume_from(record, state->energies, restore_ms);
}

}  // namespace qcr
