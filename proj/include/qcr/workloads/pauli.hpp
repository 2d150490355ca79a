#pragma once

#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "qcr/errors.hpp"
#include "qcr/program.hpp"
#include "qcr/statevector.hpp"

namespace qcr {

/// Real-weighted Pauli string; character i acts on qubit i.
struct PauliTerm {
    double coeff = 0.0;
    std::string pauli;
    friend bool operator==(const PauliTerm&, const PauliTerm&) = default;
};

using PauliSum = std::vector<PauliTerm>;

inline void validate_pauli_sum(const PauliSum& h, int num_qubits) {
    if (h.empty()) throw ConfigError("empty Pauli sum");
    for (const auto& t : h) {
        if (static_cast<int>(t.pauli.size()) != num_qubits)
            throw ConfigError("pauli term '" + t.pauli + "' does not match qubit count " +
                              std::to_string(num_qubits));
        for (char c : t.pauli)
            if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z')
                throw ConfigError("invalid pauli character in '" + t.pauli + "'");
    }
}

/// Parses "1.0*ZZ,-0.5*XI"; whitespace-free, comma-separated.
inline PauliSum parse_pauli_sum(std::string_view text) {
    PauliSum out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string_view item =
            comma == std::string_view::npos ? text.substr(pos) : text.substr(pos, comma - pos);
        if (!item.empty()) {
            std::size_t star = item.find('*');
            if (star == std::string_view::npos)
                throw ConfigError("bad pauli term '" + std::string(item) + "', expected COEFF*STRING");
            auto coeff = detail::parse_real(item.substr(0, star));
            if (!coeff) throw ConfigError("bad coefficient in '" + std::string(item) + "'");
            out.push_back({*coeff, std::string(item.substr(star + 1))});
        }
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    if (out.empty()) throw ConfigError("empty Pauli sum");
    return out;
}

inline std::string format_pauli_sum(const PauliSum& h) {
    std::string out;
    for (std::size_t i = 0; i < h.size(); ++i) {
        if (i) out.push_back(',');
        out += detail::format_double(h[i].coeff) + "*" + h[i].pauli;
    }
    return out;
}

inline double expectation(const StateVector& state, const PauliSum& h) {
    double e = 0;
    for (const auto& t : h) e += t.coeff * state.expectation(t.pauli);
    return e;
}

namespace detail {

// Single-qubit products: pauli_mul[a][b] = (phase exponent k in i^k, result)
// for P_a * P_b with order I,X,Y,Z.
struct PauliProd {
    int phase;  // exponent of i
    char result;
};

inline PauliProd pauli_mul_1q(char a, char b) {
    auto idx = [](char c) { return c == 'I' ? 0 : c == 'X' ? 1 : c == 'Y' ? 2 : 3; };
    static constexpr PauliProd table[4][4] = {
        {{0, 'I'}, {0, 'X'}, {0, 'Y'}, {0, 'Z'}},
        {{0, 'X'}, {0, 'I'}, {1, 'Z'}, {3, 'Y'}},
        {{0, 'Y'}, {3, 'Z'}, {0, 'I'}, {1, 'X'}},
        {{0, 'Z'}, {1, 'Y'}, {3, 'X'}, {0, 'I'}},
    };
    return table[idx(a)][idx(b)];
}

}  // namespace detail

/// Product P*Q of two Pauli strings: i^phase * result.
inline std::pair<int, std::string> pauli_product(std::string_view p, std::string_view q) {
    int phase = 0;
    std::string result(p.size(), 'I');
    for (std::size_t i = 0; i < p.size(); ++i) {
        auto prod = detail::pauli_mul_1q(p[i], q[i]);
        phase = (phase + prod.phase) % 4;
        result[i] = prod.result;
    }
    return {phase, result};
}

inline bool paulis_commute(std::string_view p, std::string_view q) {
    int anti = 0;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p[i] != 'I' && q[i] != 'I' && p[i] != q[i]) ++anti;
    return anti % 2 == 0;
}

/// i[A, B] as a real-weighted Pauli sum (Hermitian for Hermitian inputs).
inline PauliSum commutator_i(const PauliSum& a, const PauliSum& b) {
    std::map<std::string, double> acc;
    for (const auto& ta : a) {
        for (const auto& tb : b) {
            if (paulis_commute(ta.pauli, tb.pauli)) continue;
            auto [phase, result] = pauli_product(ta.pauli, tb.pauli);
            // i[P,Q] = 2i * P*Q for anticommuting strings; i^(phase+1) is
            // +/-1 because the product of anticommuting strings carries an
            // odd power of i.
            int k = (phase + 1) % 4;
            double sign = k == 0 ? 1.0 : -1.0;  // k is 0 or 2 here
            acc[result] += 2.0 * sign * ta.coeff * tb.coeff;
        }
    }
    PauliSum out;
    for (const auto& [pauli, coeff] : acc)
        if (coeff != 0.0) out.push_back({coeff, pauli});
    return out;
}

/// Applies exp(-i * theta * P) exactly, decomposed over the gate set:
/// basis changes into Z, a CX parity ladder, one RZ, and the unwind.
inline void apply_exp_pauli(StateVector& state, std::string_view pauli, double theta) {
    std::vector<int> support;
    for (std::size_t q = 0; q < pauli.size(); ++q)
        if (pauli[q] != 'I') support.push_back(static_cast<int>(q));
    if (support.empty()) return;  // global phase only

    const double half_pi = std::numbers::pi / 2;
    auto one = [&state](const char* g, int q, double p) {
        const int qq[1] = {q};
        const double pp[1] = {p};
        state.apply_gate(g, qq, std::span<const double>(pp, g[0] == 'r' ? 1 : 0));
    };
    auto basis_in = [&](int q) {
        if (pauli[static_cast<std::size_t>(q)] == 'X') {
            one("h", q, 0);
        } else if (pauli[static_cast<std::size_t>(q)] == 'Y') {
            one("rz", q, -half_pi);
            one("h", q, 0);
        }
    };
    auto basis_out = [&](int q) {
        if (pauli[static_cast<std::size_t>(q)] == 'X') {
            one("h", q, 0);
        } else if (pauli[static_cast<std::size_t>(q)] == 'Y') {
            one("h", q, 0);
            one("rz", q, half_pi);
        }
    };

    for (int q : support) basis_in(q);
    for (std::size_t i = 0; i + 1 < support.size(); ++i) {
        const int qq[2] = {support[i], support[i + 1]};
        state.apply_gate("cx", qq, {});
    }
    one("rz", support.back(), 2 * theta);
    for (std::size_t i = support.size() - 1; i-- > 0;) {
        const int qq[2] = {support[i], support[i + 1]};
        state.apply_gate("cx", qq, {});
    }
    for (int q : support) basis_out(q);
}

/// First-order Trotter step exp(-i * H * dt), term by term in order.
/// Exact when the terms commute.
inline void apply_exp_pauli_sum(StateVector& state, const PauliSum& h, double dt) {
    for (const auto& t : h) apply_exp_pauli(state, t.pauli, t.coeff * dt);
}

}  // namespace qcr
