#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qcr/sha256.hpp"

namespace qcr {

enum class CheckpointClass { Classicalized, Algorithmic, Logical };

inline std::string to_string(CheckpointClass c) {
    switch (c) {
        case CheckpointClass::Classicalized: return "classicalized";
        case CheckpointClass::Algorithmic: return "algorithmic";
        case CheckpointClass::Logical: return "logical";
    }
    return "classicalized";
}

inline std::optional<CheckpointClass> checkpoint_class_from_string(std::string_view s) {
    if (s == "classicalized") return CheckpointClass::Classicalized;
    if (s == "algorithmic") return CheckpointClass::Algorithmic;
    if (s == "logical") return CheckpointClass::Logical;
    return std::nullopt;
}

// --- Instruction payloads ------------------------------------------------

struct GateOp {
    std::string name;
    std::vector<int> qubits;
    std::vector<double> params;
    friend bool operator==(const GateOp&, const GateOp&) = default;
};

struct MeasureOp {
    int qubit = 0;
    std::string creg;
    int bit = 0;
    friend bool operator==(const MeasureOp&, const MeasureOp&) = default;
};

struct ResetOp {
    int qubit = 0;
    friend bool operator==(const ResetOp&, const ResetOp&) = default;
};

struct RegionStartOp {
    std::string name;
    friend bool operator==(const RegionStartOp&, const RegionStartOp&) = default;
};

struct CheckpointMarkerOp {
    std::optional<CheckpointClass> class_hint;
    friend bool operator==(const CheckpointMarkerOp&, const CheckpointMarkerOp&) = default;
};

/// Single classical-bit condition: creg[bit] == value.
struct GuardCond {
    std::string creg;
    int bit = 0;
    int value = 0;
    friend bool operator==(const GuardCond&, const GuardCond&) = default;
};

/// One program instruction. Guarded execution is modeled as an optional
/// condition on the instruction, which makes nested guards unrepresentable.
struct Instruction {
    using Payload = std::variant<GateOp, MeasureOp, ResetOp, RegionStartOp, CheckpointMarkerOp>;
    Payload op;
    std::optional<GuardCond> guard;
    int op_index = 0;

    bool is_measurement() const {
        return std::holds_alternative<MeasureOp>(op) || std::holds_alternative<ResetOp>(op);
    }
    friend bool operator==(const Instruction&, const Instruction&) = default;
};

struct CregDecl {
    std::string name;
    int width = 0;
    friend bool operator==(const CregDecl&, const CregDecl&) = default;
};

struct RegionDescriptor {
    std::string name;
    int start_op = 0;
    int end_op = 0;  // exclusive
    bool checkpointable = true;
    friend bool operator==(const RegionDescriptor&, const RegionDescriptor&) = default;
};

struct Program {
    int num_qubits = 0;
    std::vector<CregDecl> cregs;
    std::vector<Instruction> instructions;
    std::vector<RegionDescriptor> regions;
    std::string source_digest;  // 64-hex SHA-256 of the source text

    const CregDecl* find_creg(std::string_view name) const {
        for (const auto& c : cregs)
            if (c.name == name) return &c;
        return nullptr;
    }
    /// Index of the region containing op, or -1.
    int region_of(int op) const {
        for (std::size_t i = 0; i < regions.size(); ++i)
            if (op >= regions[i].start_op && op < regions[i].end_op) return static_cast<int>(i);
        return -1;
    }
    int find_region(std::string_view name) const {
        for (std::size_t i = 0; i < regions.size(); ++i)
            if (regions[i].name == name) return static_cast<int>(i);
        return -1;
    }
};

inline bool structurally_equal(const Program& a, const Program& b) {
    return a.num_qubits == b.num_qubits && a.cregs == b.cregs && a.instructions == b.instructions &&
           a.regions == b.regions;
}

// --- Diagnostics ----------------------------------------------------------

enum class Severity { Error, Warning };
enum class DiagnosticKind { SyntaxError, SemanticError, EmptyProgram };

struct Diagnostic {
    Severity severity = Severity::Error;
    DiagnosticKind kind = DiagnosticKind::SyntaxError;
    int line = 0;    // 1-based; 0 when not tied to a source line
    int column = 0;  // 1-based
    int op_index = -1;
    std::string message;
};

struct ParseResult {
    std::optional<Program> program;
    std::vector<Diagnostic> diagnostics;
    bool ok() const { return program.has_value(); }
};

// --- Gate table -----------------------------------------------------------

struct GateInfo {
    int arity;
    int num_params;
};

inline const GateInfo* gate_info(std::string_view name) {
    static const std::map<std::string, GateInfo, std::less<>> table = {
        {"h", {1, 0}},  {"x", {1, 0}},  {"y", {1, 0}},  {"z", {1, 0}},
        {"s", {1, 0}},  {"t", {1, 0}},  {"cx", {2, 0}}, {"cz", {2, 0}},
        {"rx", {1, 1}}, {"ry", {1, 1}}, {"rz", {1, 1}},
    };
    auto it = table.find(name);
    return it == table.end() ? nullptr : &it->second;
}

// --- Helpers --------------------------------------------------------------

namespace detail {

inline std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

struct Token {
    std::string_view text;
    int column;  // 1-based
};

inline std::vector<Token> tokenize_line(std::string_view line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        if (line[i] == ' ' || line[i] == '\t') {
            ++i;
            continue;
        }
        if (line[i] == '#') break;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '#') ++j;
        out.push_back({line.substr(i, j - i), static_cast<int>(i + 1)});
        i = j;
    }
    return out;
}

inline std::optional<long> parse_int(std::string_view s) {
    long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

inline std::optional<double> parse_real(std::string_view s) {
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) return std::nullopt;
    return v;
}

// "name[3]" -> (name, 3)
inline std::optional<std::pair<std::string, int>> parse_bit_ref(std::string_view s) {
    auto lb = s.find('[');
    if (lb == std::string_view::npos || s.empty() || s.back() != ']' || lb == 0) return std::nullopt;
    auto idx = parse_int(s.substr(lb + 1, s.size() - lb - 2));
    if (!idx || *idx < 0) return std::nullopt;
    return std::make_pair(std::string(s.substr(0, lb)), static_cast<int>(*idx));
}

inline bool valid_name(std::string_view s) {
    if (s.empty() || (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_')) return false;
    return std::all_of(s.begin(), s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
}

}  // namespace detail

// --- Operations -----------------------------------------------------------

/// Lowercase hex SHA-256 of the exact source bytes.
inline std::string program_digest(std::string_view text) { return sha256_hex(text); }

/// Checkpoint markers must sit where the needed quantum information is
/// already classical: at a region boundary or directly after an
/// (unconditional) measurement or reset.
inline bool marker_position_ok(const std::vector<Instruction>& instrs, std::size_t idx) {
    if (idx == 0) return true;
    const Instruction& prev = instrs[idx - 1];
    if (std::holds_alternative<RegionStartOp>(prev.op)) return true;
    if (prev.is_measurement() && !prev.guard) return true;
    if (idx + 1 == instrs.size()) return true;
    if (std::holds_alternative<RegionStartOp>(instrs[idx + 1].op)) return true;
    return false;
}

/// Re-checks every Program invariant on an already-constructed object.
/// Returns an empty list iff the program is valid.
inline std::vector<Diagnostic> validate(const Program& program) {
    std::vector<Diagnostic> out;
    auto err = [&out](int op_index, std::string msg) {
        out.push_back({Severity::Error, DiagnosticKind::SemanticError, 0, 0, op_index, std::move(msg)});
    };

    if (program.num_qubits <= 0) err(-1, "num_qubits must be positive");

    std::set<std::string> creg_names;
    for (const auto& c : program.cregs) {
        if (!creg_names.insert(c.name).second) err(-1, "duplicate creg '" + c.name + "'");
        if (c.width <= 0) err(-1, "creg '" + c.name + "' must have positive width");
    }

    auto check_qubit = [&](int op_index, int q) {
        if (q < 0 || q >= program.num_qubits)
            err(op_index, "qubit " + std::to_string(q) + " out of range");
    };
    auto check_bit_ref = [&](int op_index, const std::string& creg, int bit) {
        const CregDecl* c = program.find_creg(creg);
        if (!c) {
            err(op_index, "undeclared creg '" + creg + "'");
        } else if (bit < 0 || bit >= c->width) {
            err(op_index, "bit " + std::to_string(bit) + " out of range for creg '" + creg + "'");
        }
    };

    for (std::size_t i = 0; i < program.instructions.size(); ++i) {
        const Instruction& ins = program.instructions[i];
        const int at = static_cast<int>(i);
        if (ins.op_index != at) err(at, "op_index does not match position");
        if (const auto* g = std::get_if<GateOp>(&ins.op)) {
            const GateInfo* info = gate_info(g->name);
            if (!info) {
                err(at, "unknown gate '" + g->name + "'");
            } else {
                if (static_cast<int>(g->qubits.size()) != info->arity)
                    err(at, "gate '" + g->name + "' expects " + std::to_string(info->arity) + " qubit(s)");
                if (static_cast<int>(g->params.size()) != info->num_params)
                    err(at, "gate '" + g->name + "' expects " + std::to_string(info->num_params) +
                                " parameter(s)");
            }
            for (int q : g->qubits) check_qubit(at, q);
            std::set<int> uniq(g->qubits.begin(), g->qubits.end());
            if (uniq.size() != g->qubits.size()) err(at, "duplicate qubit operand");
        } else if (const auto* m = std::get_if<MeasureOp>(&ins.op)) {
            check_qubit(at, m->qubit);
            check_bit_ref(at, m->creg, m->bit);
        } else if (const auto* r = std::get_if<ResetOp>(&ins.op)) {
            check_qubit(at, r->qubit);
        } else if (std::holds_alternative<CheckpointMarkerOp>(ins.op)) {
            if (!marker_position_ok(program.instructions, i))
                err(at, "checkpoint marker not at a region boundary or after a measurement");
        }
        if (ins.guard) {
            check_bit_ref(at, ins.guard->creg, ins.guard->bit);
            if (ins.guard->value != 0 && ins.guard->value != 1) err(at, "guard compares to non-bit constant");
            if (std::holds_alternative<RegionStartOp>(ins.op) ||
                std::holds_alternative<CheckpointMarkerOp>(ins.op))
                err(at, "guard may not wrap a region start or checkpoint marker");
        }
    }

    // Regions: unique names, in order, contiguous, covering all instructions.
    std::set<std::string> region_names;
    int cursor = 0;
    for (const auto& r : program.regions) {
        if (!region_names.insert(r.name).second) err(r.start_op, "duplicate region '" + r.name + "'");
        if (r.start_op >= r.end_op) err(r.start_op, "region '" + r.name + "' is empty or inverted");
        if (r.start_op != cursor)
            err(r.start_op, "region '" + r.name + "' does not start where the previous region ends");
        cursor = r.end_op;
    }
    if (cursor != static_cast<int>(program.instructions.size()))
        err(-1, "regions do not cover all instructions");
    // Explicit region starts must line up with descriptors.
    for (std::size_t i = 0; i < program.instructions.size(); ++i) {
        if (const auto* rs = std::get_if<RegionStartOp>(&program.instructions[i].op)) {
            int ri = program.region_of(static_cast<int>(i));
            if (ri < 0 || program.regions[ri].start_op != static_cast<int>(i) ||
                program.regions[ri].name != rs->name)
                err(static_cast<int>(i), "region start does not match a region descriptor");
        }
    }
    return out;
}

/// Parses the line-oriented dynamic-circuit DSL. Total: returns
/// diagnostics instead of throwing, whatever the input bytes.
inline ParseResult parse_program(std::string_view text) {
    ParseResult result;
    auto fail = [&result](DiagnosticKind kind, int line, int col, std::string msg) {
        result.diagnostics.push_back({Severity::Error, kind, line, col, -1, std::move(msg)});
    };

    Program prog;
    prog.source_digest = program_digest(text);

    // Split lines; accept LF and CRLF.
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        std::string_view line =
            nl == std::string_view::npos ? text.substr(start) : text.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        if (nl == std::string_view::npos) break;
        start = nl + 1;
    }

    bool have_header = false;
    bool body_started = false;

    // Parses one instruction from tokens[from..]; nullopt on error (diagnostic emitted).
    auto parse_instr = [&](const std::vector<detail::Token>& toks, std::size_t from, int lineno,
                           bool inside_guard) -> std::optional<Instruction> {
        const auto& head = toks[from];
        auto rest = [&](std::size_t k) -> const detail::Token* {
            return from + k < toks.size() ? &toks[from + k] : nullptr;
        };
        std::size_t argc = toks.size() - from - 1;

        if (head.text == "measure") {
            if (argc != 3 || rest(2)->text != "->") {
                fail(DiagnosticKind::SyntaxError, lineno, head.column,
                     "expected: measure <qubit> -> <creg>[<bit>]");
                return std::nullopt;
            }
            auto q = detail::parse_int(rest(1)->text);
            auto ref = detail::parse_bit_ref(rest(3)->text);
            if (!q || !ref) {
                fail(DiagnosticKind::SyntaxError, lineno, rest(1)->column, "malformed measure operands");
                return std::nullopt;
            }
            return Instruction{MeasureOp{static_cast<int>(*q), ref->first, ref->second}, std::nullopt, 0};
        }
        if (head.text == "reset") {
            auto q = argc == 1 ? detail::parse_int(rest(1)->text) : std::nullopt;
            if (!q) {
                fail(DiagnosticKind::SyntaxError, lineno, head.column, "expected: reset <qubit>");
                return std::nullopt;
            }
            return Instruction{ResetOp{static_cast<int>(*q)}, std::nullopt, 0};
        }
        if (head.text == "region" || head.text == "ckpt") {
            if (inside_guard) {
                fail(DiagnosticKind::SemanticError, lineno, head.column,
                     "guard may not wrap '" + std::string(head.text) + "'");
                return std::nullopt;
            }
            if (head.text == "region") {
                if (argc != 1 || !detail::valid_name(rest(1)->text)) {
                    fail(DiagnosticKind::SyntaxError, lineno, head.column, "expected: region <name>");
                    return std::nullopt;
                }
                return Instruction{RegionStartOp{std::string(rest(1)->text)}, std::nullopt, 0};
            }
            if (argc > 1) {
                fail(DiagnosticKind::SyntaxError, lineno, head.column, "expected: ckpt [<class>]");
                return std::nullopt;
            }
            std::optional<CheckpointClass> hint;
            if (argc == 1) {
                hint = checkpoint_class_from_string(rest(1)->text);
                if (!hint) {
                    fail(DiagnosticKind::SyntaxError, lineno, rest(1)->column,
                         "unknown checkpoint class '" + std::string(rest(1)->text) + "'");
                    return std::nullopt;
                }
            }
            return Instruction{CheckpointMarkerOp{hint}, std::nullopt, 0};
        }
        if (const GateInfo* info = gate_info(head.text)) {
            if (argc != static_cast<std::size_t>(info->arity + info->num_params)) {
                fail(DiagnosticKind::SyntaxError, lineno, head.column,
                     "gate '" + std::string(head.text) + "' expects " + std::to_string(info->arity) +
                         " qubit(s) and " + std::to_string(info->num_params) + " parameter(s)");
                return std::nullopt;
            }
            GateOp g{std::string(head.text), {}, {}};
            for (int k = 0; k < info->arity; ++k) {
                auto q = detail::parse_int(rest(1 + k)->text);
                if (!q) {
                    fail(DiagnosticKind::SyntaxError, lineno, rest(1 + k)->column, "malformed qubit index");
                    return std::nullopt;
                }
                g.qubits.push_back(static_cast<int>(*q));
            }
            for (int k = 0; k < info->num_params; ++k) {
                auto v = detail::parse_real(rest(1 + info->arity + k)->text);
                if (!v) {
                    fail(DiagnosticKind::SyntaxError, lineno, rest(1 + info->arity + k)->column,
                         "malformed gate parameter");
                    return std::nullopt;
                }
                g.params.push_back(*v);
            }
            return Instruction{std::move(g), std::nullopt, 0};
        }
        fail(DiagnosticKind::SyntaxError, lineno, head.column,
             "unknown instruction '" + std::string(head.text) + "'");
        return std::nullopt;
    };

    for (std::size_t li = 0; li < lines.size(); ++li) {
        const int lineno = static_cast<int>(li + 1);
        auto toks = detail::tokenize_line(lines[li]);
        if (toks.empty()) continue;

        if (!have_header) {
            if (toks[0].text != "qubits") {
                fail(DiagnosticKind::EmptyProgram, lineno, toks[0].column,
                     "program must begin with a 'qubits <n>' header");
                return result;
            }
            auto n = toks.size() == 2 ? detail::parse_int(toks[1].text) : std::nullopt;
            if (!n || *n <= 0) {
                fail(DiagnosticKind::SyntaxError, lineno, toks[0].column, "expected: qubits <positive int>");
                return result;
            }
            prog.num_qubits = static_cast<int>(*n);
            have_header = true;
            continue;
        }

        if (toks[0].text == "qubits") {
            fail(DiagnosticKind::SyntaxError, lineno, toks[0].column, "duplicate 'qubits' header");
            continue;
        }

        if (toks[0].text == "creg") {
            if (body_started) {
                fail(DiagnosticKind::SyntaxError, lineno, toks[0].column,
                     "creg declarations must precede instructions");
                continue;
            }
            auto w = toks.size() == 3 ? detail::parse_int(toks[2].text) : std::nullopt;
            if (toks.size() != 3 || !detail::valid_name(toks[1].text) || !w || *w <= 0) {
                fail(DiagnosticKind::SyntaxError, lineno, toks[0].column, "expected: creg <name> <width>");
                continue;
            }
            if (prog.find_creg(toks[1].text)) {
                fail(DiagnosticKind::SemanticError, lineno, toks[1].column,
                     "duplicate creg '" + std::string(toks[1].text) + "'");
                continue;
            }
            prog.cregs.push_back({std::string(toks[1].text), static_cast<int>(*w)});
            continue;
        }

        body_started = true;

        std::optional<GuardCond> guard;
        std::size_t from = 0;
        if (toks[0].text == "if") {
            // if <creg>[<i>] == <0|1>: <instr>
            bool shape_ok = toks.size() >= 5 && toks[2].text == "==" && !toks[3].text.empty() &&
                            toks[3].text.back() == ':';
            auto ref = shape_ok ? detail::parse_bit_ref(toks[1].text) : std::nullopt;
            auto bit = shape_ok
                           ? detail::parse_int(toks[3].text.substr(0, toks[3].text.size() - 1))
                           : std::nullopt;
            if (!ref || !bit || (*bit != 0 && *bit != 1)) {
                fail(DiagnosticKind::SyntaxError, lineno, toks[0].column,
                     "expected: if <creg>[<bit>] == <0|1>: <instruction>");
                continue;
            }
            if (toks[4].text == "if") {
                fail(DiagnosticKind::SemanticError, lineno, toks[4].column, "guards may not nest");
                continue;
            }
            guard = GuardCond{ref->first, ref->second, static_cast<int>(*bit)};
            from = 4;
        }

        auto ins = parse_instr(toks, from, lineno, guard.has_value());
        if (!ins) continue;
        ins->guard = guard;
        ins->op_index = static_cast<int>(prog.instructions.size());
        prog.instructions.push_back(std::move(*ins));

        // Line-level semantic checks, with source locations.
        const Instruction& cur = prog.instructions.back();
        auto sem = [&](std::string msg) {
            fail(DiagnosticKind::SemanticError, lineno, toks[from].column, std::move(msg));
        };
        auto check_q = [&](int q) {
            if (q < 0 || q >= prog.num_qubits) sem("qubit " + std::to_string(q) + " out of range");
        };
        auto check_ref = [&](const std::string& creg, int bit) {
            const CregDecl* c = prog.find_creg(creg);
            if (!c)
                sem("undeclared creg '" + creg + "'");
            else if (bit < 0 || bit >= c->width)
                sem("bit " + std::to_string(bit) + " out of range for creg '" + creg + "'");
        };
        if (const auto* g = std::get_if<GateOp>(&cur.op)) {
            for (int q : g->qubits) check_q(q);
            std::set<int> uniq(g->qubits.begin(), g->qubits.end());
            if (uniq.size() != g->qubits.size()) sem("duplicate qubit operand");
        } else if (const auto* m = std::get_if<MeasureOp>(&cur.op)) {
            check_q(m->qubit);
            check_ref(m->creg, m->bit);
        } else if (const auto* r = std::get_if<ResetOp>(&cur.op)) {
            check_q(r->qubit);
        } else if (const auto* rs = std::get_if<RegionStartOp>(&cur.op)) {
            for (const auto& rr : prog.regions)
                if (rr.name == rs->name) sem("duplicate region '" + rs->name + "'");
        }
        if (cur.guard) check_ref(cur.guard->creg, cur.guard->bit);

        // Maintain region descriptors as instructions arrive.
        const int at = cur.op_index;
        if (std::holds_alternative<RegionStartOp>(cur.op)) {
            if (!prog.regions.empty())
                prog.regions.back().end_op = at;
            else if (at > 0)
                prog.regions.push_back({"main", 0, at, true});
            prog.regions.push_back({std::get<RegionStartOp>(cur.op).name, at, at + 1, true});
        } else if (prog.regions.empty() ) {
            prog.regions.push_back({"main", 0, at + 1, true});
        }
        if (!prog.regions.empty()) prog.regions.back().end_op = at + 1;
    }

    if (!have_header) {
        fail(DiagnosticKind::EmptyProgram, 0, 0, "program must begin with a 'qubits <n>' header");
        return result;
    }

    // Marker placement needs the whole instruction list.
    for (std::size_t i = 0; i < prog.instructions.size(); ++i) {
        if (std::holds_alternative<CheckpointMarkerOp>(prog.instructions[i].op) &&
            !marker_position_ok(prog.instructions, i)) {
            result.diagnostics.push_back(
                {Severity::Error, DiagnosticKind::SemanticError, 0, 0, static_cast<int>(i),
                 "checkpoint marker not at a region boundary or after a measurement"});
        }
    }

    bool has_error = std::any_of(result.diagnostics.begin(), result.diagnostics.end(),
                                 [](const Diagnostic& d) { return d.severity == Severity::Error; });
    if (!has_error) {
        // Safety net: the parser must never hand out a program that
        // validate() would reject.
        for (auto& d : validate(prog)) result.diagnostics.push_back(std::move(d));
        has_error = std::any_of(result.diagnostics.begin(), result.diagnostics.end(),
                                [](const Diagnostic& d) { return d.severity == Severity::Error; });
    }
    if (!has_error) result.program = std::move(prog);
    return result;
}

/// Canonical text form; parse_program(pretty_print(p)) is structurally p.
inline std::string pretty_print(const Program& program) {
    std::string out = "qubits " + std::to_string(program.num_qubits) + "\n";
    for (const auto& c : program.cregs) out += "creg " + c.name + " " + std::to_string(c.width) + "\n";
    for (const auto& ins : program.instructions) {
        std::string line;
        if (ins.guard)
            line += "if " + ins.guard->creg + "[" + std::to_string(ins.guard->bit) +
                    "] == " + std::to_string(ins.guard->value) + ": ";
        if (const auto* g = std::get_if<GateOp>(&ins.op)) {
            line += g->name;
            for (int q : g->qubits) line += " " + std::to_string(q);
            for (double p : g->params) line += " " + detail::format_double(p);
        } else if (const auto* m = std::get_if<MeasureOp>(&ins.op)) {
            line += "measure " + std::to_string(m->qubit) + " -> " + m->creg + "[" +
                    std::to_string(m->bit) + "]";
        } else if (const auto* r = std::get_if<ResetOp>(&ins.op)) {
            line += "reset " + std::to_string(r->qubit);
        } else if (const auto* rs = std::get_if<RegionStartOp>(&ins.op)) {
            line += "region " + rs->name;
        } else if (const auto* ck = std::get_if<CheckpointMarkerOp>(&ins.op)) {
            line += "ckpt";
            if (ck->class_hint) line += " " + to_string(*ck->class_hint);
        }
        out += line + "\n";
    }
    return out;
}

// --- Boundaries -----------------------------------------------------------

struct Boundary {
    std::string region_name;
    int op_index = 0;
    bool checkpointable = true;
    friend bool operator==(const Boundary&, const Boundary&) = default;
};

/// Safe checkpoint boundaries, in program order: every region start plus
/// every explicit checkpoint marker.
inline std::vector<Boundary> region_boundaries(const Program& program) {
    std::vector<Boundary> out;
    for (const auto& r : program.regions) out.push_back({r.name, r.start_op, r.checkpointable});
    for (const auto& ins : program.instructions) {
        if (std::holds_alternative<CheckpointMarkerOp>(ins.op)) {
            int ri = program.region_of(ins.op_index);
            out.push_back({ri >= 0 ? program.regions[ri].name : std::string{}, ins.op_index, true});
        }
    }
    std::sort(out.begin(), out.end(),
              [](const Boundary& a, const Boundary& b) { return a.op_index < b.op_index; });
    return out;
}

inline const Boundary* find_boundary(const std::vector<Boundary>& bs, int op_index) {
    for (const auto& b : bs)
        if (b.op_index == op_index) return &b;
    return nullptr;
}

}  // namespace qcr
