#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qcr/errors.hpp"
#include "qcr/rng.hpp"

namespace qcr {

inline constexpr int kMaxQubits = 22;

/// Probabilities below this are treated as genuinely impossible rather
/// than floating-point dust when replaying a recorded outcome.
inline constexpr double kZeroProbabilityThreshold = 1e-12;

using cplx = std::complex<double>;

/// Dense 2^n statevector, qubit i on bit i of the amplitude index.
/// This is the runtime's only quantum object; nothing in it is ever
/// written into a checkpoint.
class StateVector {
public:
    explicit StateVector(int num_qubits) : n_(num_qubits) {
        if (num_qubits < 1 || num_qubits > kMaxQubits)
            throw QubitCountOutOfRange("qubit count " + std::to_string(num_qubits) +
                                       " outside [1, " + std::to_string(kMaxQubits) + "]");
        amps_.assign(std::size_t{1} << n_, cplx{0.0, 0.0});
        amps_[0] = 1.0;
    }

    int num_qubits() const { return n_; }
    std::size_t dim() const { return amps_.size(); }
    std::span<const cplx> amplitudes() const { return amps_; }
    cplx amplitude(std::size_t basis) const { return amps_[basis]; }

    double norm_sq() const {
        double s = 0;
        for (const cplx& a : amps_) s += std::norm(a);
        return s;
    }

    void apply_gate(std::string_view name, std::span<const int> qubits, std::span<const double> params) {
        for (int q : qubits) check_qubit(q);
        for (std::size_t i = 0; i < qubits.size(); ++i)
            for (std::size_t j = i + 1; j < qubits.size(); ++j)
                if (qubits[i] == qubits[j]) throw DuplicateQubit("duplicate qubit operand");

        const double inv_sqrt2 = std::numbers::sqrt2 / 2.0;
        const cplx i1{0.0, 1.0};
        if (name == "h") {
            apply_1q(qubits[0], {inv_sqrt2, inv_sqrt2, inv_sqrt2, -inv_sqrt2});
        } else if (name == "x") {
            apply_1q(qubits[0], {0, 1, 1, 0});
        } else if (name == "y") {
            apply_1q(qubits[0], {0, -i1, i1, 0});
        } else if (name == "z") {
            apply_1q(qubits[0], {1, 0, 0, -1});
        } else if (name == "s") {
            apply_1q(qubits[0], {1, 0, 0, i1});
        } else if (name == "t") {
            apply_1q(qubits[0], {1, 0, 0, std::polar(1.0, std::numbers::pi / 4)});
        } else if (name == "rx") {
            double h = params[0] / 2;
            apply_1q(qubits[0], {std::cos(h), -i1 * std::sin(h), -i1 * std::sin(h), std::cos(h)});
        } else if (name == "ry") {
            double h = params[0] / 2;
            apply_1q(qubits[0], {std::cos(h), -std::sin(h), std::sin(h), std::cos(h)});
        } else if (name == "rz") {
            double h = params[0] / 2;
            apply_1q(qubits[0], {std::polar(1.0, -h), 0, 0, std::polar(1.0, h)});
        } else if (name == "cx") {
            apply_cx(qubits[0], qubits[1]);
        } else if (name == "cz") {
            apply_cz(qubits[0], qubits[1]);
        } else {
            throw UnknownGate("unknown gate '" + std::string(name) + "'");
        }
    }

    /// Probability that measuring `qubit` yields `outcome`, clamped to [0,1].
    double probability_of(int qubit, int outcome) const {
        check_qubit(qubit);
        const std::size_t mask = std::size_t{1} << qubit;
        double p1 = 0;
        for (std::size_t i = 0; i < amps_.size(); ++i)
            if (i & mask) p1 += std::norm(amps_[i]);
        double p = outcome ? p1 : 1.0 - p1;
        return p < 0 ? 0.0 : (p > 1 ? 1.0 : p);
    }

    /// Projective measurement given an externally drawn uniform u in [0,1).
    int measure_with(int qubit, double u) {
        double p0 = probability_of(qubit, 0);
        int outcome = u < p0 ? 0 : 1;
        collapse(qubit, outcome, outcome ? 1.0 - p0 : p0);
        return outcome;
    }

    /// Projective measurement; consumes exactly one draw.
    int measure(int qubit, RngStream& rng) { return measure_with(qubit, rng_next_unit(rng)); }

    /// Collapse onto a recorded outcome; consumes exactly one draw so the
    /// stream stays aligned with the free-sampling path. Throws
    /// ZeroProbabilityOutcome when the recorded outcome is impossible here.
    void force_measure(int qubit, int outcome, RngStream& rng) {
        (void)rng_next_unit(rng);
        force_outcome(qubit, outcome);
    }

    /// Collapse without touching the stream (branch enumeration).
    void force_outcome(int qubit, int outcome) {
        double p = probability_of(qubit, outcome);
        if (p < kZeroProbabilityThreshold)
            throw ZeroProbabilityOutcome("outcome " + std::to_string(outcome) + " on qubit " +
                                         std::to_string(qubit) + " has probability " +
                                         std::to_string(p));
        collapse(qubit, outcome, p);
    }

    /// Measure then flip back to |0>. Returns the pre-reset bit; one draw.
    int reset(int qubit, RngStream& rng) {
        int bit = measure(qubit, rng);
        if (bit == 1) {
            const int q[1] = {qubit};
            apply_gate("x", q, {});
        }
        return bit;
    }

    /// Exact <psi|P|psi> for a Pauli string with character i acting on qubit i.
    double expectation(std::string_view pauli) const {
        if (static_cast<int>(pauli.size()) != n_)
            throw BadPauliString("pauli string length " + std::to_string(pauli.size()) +
                                 " != qubit count " + std::to_string(n_));
        std::size_t flip_mask = 0;
        std::vector<int> ys, zs;
        for (int q = 0; q < n_; ++q) {
            switch (pauli[q]) {
                case 'I': break;
                case 'X': flip_mask |= std::size_t{1} << q; break;
                case 'Y':
                    flip_mask |= std::size_t{1} << q;
                    ys.push_back(q);
                    break;
                case 'Z': zs.push_back(q); break;
                default:
                    throw BadPauliString("invalid pauli character '" + std::string(1, pauli[q]) + "'");
            }
        }
        cplx acc{0.0, 0.0};
        for (std::size_t b = 0; b < amps_.size(); ++b) {
            if (amps_[b] == cplx{0.0, 0.0}) continue;
            cplx phase{1.0, 0.0};
            for (int q : ys) phase *= (b >> q) & 1 ? cplx{0.0, -1.0} : cplx{0.0, 1.0};
            for (int q : zs)
                if ((b >> q) & 1) phase = -phase;
            acc += std::conj(amps_[b ^ flip_mask]) * phase * amps_[b];
        }
        return acc.real();
    }

    /// |<other|this>|^2.
    double fidelity_with(std::span<const cplx> other) const {
        cplx ov{0.0, 0.0};
        for (std::size_t i = 0; i < amps_.size() && i < other.size(); ++i)
            ov += std::conj(other[i]) * amps_[i];
        return std::norm(ov);
    }

private:
    void check_qubit(int q) const {
        if (q < 0 || q >= n_) throw QubitOutOfRange("qubit " + std::to_string(q) + " out of range");
    }

    // Row-major 2x2 {m00, m01, m10, m11} on the given qubit.
    void apply_1q(int qubit, std::array<cplx, 4> m) {
        const std::size_t mask = std::size_t{1} << qubit;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            if (i & mask) continue;
            cplx a0 = amps_[i], a1 = amps_[i | mask];
            amps_[i] = m[0] * a0 + m[1] * a1;
            amps_[i | mask] = m[2] * a0 + m[3] * a1;
        }
    }

    void apply_cx(int control, int target) {
        const std::size_t cm = std::size_t{1} << control, tm = std::size_t{1} << target;
        for (std::size_t i = 0; i < amps_.size(); ++i)
            if ((i & cm) && !(i & tm)) std::swap(amps_[i], amps_[i | tm]);
    }

    void apply_cz(int a, int b) {
        const std::size_t am = std::size_t{1} << a, bm = std::size_t{1} << b;
        for (std::size_t i = 0; i < amps_.size(); ++i)
            if ((i & am) && (i & bm)) amps_[i] = -amps_[i];
    }

    void collapse(int qubit, int outcome, double prob) {
        const std::size_t mask = std::size_t{1} << qubit;
        const double scale = 1.0 / std::sqrt(prob);
        for (std::size_t i = 0; i < amps_.size(); ++i) {
            bool bit = (i & mask) != 0;
            if (bit != (outcome == 1))
                amps_[i] = 0.0;
            else
                amps_[i] *= scale;
        }
    }

    int n_;
    std::vector<cplx> amps_;
};

}  // namespace qcr
