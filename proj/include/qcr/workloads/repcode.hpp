#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qcr/runtime.hpp"

namespace qcr {

/// Three-qubit bit-flip repetition code with two syndrome ancillas.
/// Syndromes are extracted for `rounds` rounds; the decoder is a
/// majority-vote Pauli-frame tracker (no physical correction applied).
/// Each round ends in a logical checkpoint carrying the syndrome history
/// and the frame.
struct RepcodeConfig {
    long rounds = 5;
    std::optional<std::pair<long, int>> injected_error;  // (round 1-based, data qubit 0..2)
    std::uint64_t master_seed = 0;

    void validate() const {
        if (rounds < 1) throw ConfigError("rounds must be >= 1");
        if (injected_error) {
            if (injected_error->first < 1 || injected_error->first > rounds)
                throw ConfigError("injected error round out of range");
            if (injected_error->second < 0 || injected_error->second > 2)
                throw ConfigError("injected error qubit out of range");
        }
    }

    std::string program_text() const {
        std::string t = "qubits 5\n";  // data 0..2, ancillas 3,4
        t += "creg s0 " + std::to_string(rounds) + "\n";
        t += "creg s1 " + std::to_string(rounds) + "\n";
        t += "creg data 3\n";
        for (long r = 1; r <= rounds; ++r) {
            t += "region round" + std::to_string(r) + "\n";
            if (injected_error && injected_error->first == r)
                t += "x " + std::to_string(injected_error->second) + "\n";
            t += "cx 0 3\ncx 1 3\n";
            t += "cx 1 4\ncx 2 4\n";
            t += "measure 3 -> s0[" + std::to_string(r - 1) + "]\n";
            t += "measure 4 -> s1[" + std::to_string(r - 1) + "]\n";
            t += "reset 3\nreset 4\n";
            t += "ckpt logical\n";
        }
        t += "region readout\n";
        t += "measure 0 -> data[0]\nmeasure 1 -> data[1]\nmeasure 2 -> data[2]\n";
        return t;
    }

    std::string canonical_text() const {
        std::string inj = injected_error ? std::to_string(injected_error->first) + ":" +
                                               std::to_string(injected_error->second)
                                         : "none";
        return "workload repcode\nrounds " + std::to_string(rounds) + "\ninject " + inj +
               "\nseed " + std::to_string(master_seed) + "\n";
    }
};

/// Majority-vote decoder over syndrome differences: a fresh (1,0) points
/// at data 0, (1,1) at data 1, (0,1) at data 2.
struct RepcodeDecoder {
    std::string frame = "III";
    std::vector<std::vector<std::uint8_t>> syndrome_history;

    void absorb_round(std::uint8_t s0, std::uint8_t s1) {
        std::uint8_t p0 = 0, p1 = 0;
        if (!syndrome_history.empty()) {
            p0 = syndrome_history.back()[0];
            p1 = syndrome_history.back()[1];
        }
        const int d0 = s0 ^ p0, d1 = s1 ^ p1;
        if (d0 == 1 && d1 == 0) flip(0);
        if (d0 == 1 && d1 == 1) flip(1);
        if (d0 == 0 && d1 == 1) flip(2);
        syndrome_history.push_back({s0, s1});
    }

    void flip(int q) { frame[static_cast<std::size_t>(q)] = frame[static_cast<std::size_t>(q)] == 'X' ? 'I' : 'X'; }

    DecoderState state() const { return {frame, syndrome_history}; }

    static RepcodeDecoder from_state(const DecoderState& s) {
        RepcodeDecoder d;
        d.frame = s.pauli_frame;
        d.syndrome_history = s.syndrome_history;
        return d;
    }
};

struct RepcodeOutcome {
    RunOutcome run;
    std::string pauli_frame;
    std::vector<std::vector<std::uint8_t>> syndrome_history;
    std::vector<int> logical_readout;  // frame applied to the physical bits
    int logical_outcome = 0;           // majority vote
};

namespace detail {

struct RepcodeHarness {
    RepcodeConfig cfg;
    std::shared_ptr<RepcodeDecoder> decoder = std::make_shared<RepcodeDecoder>();
    ShotWorkloadConfig wcfg;
    WorkloadHooks hooks;

    explicit RepcodeHarness(const RepcodeConfig& c) : cfg(c) {
        cfg.validate();
        auto parsed = parse_program(cfg.program_text());
        if (!parsed.ok()) throw ConfigError("generated repcode program failed to parse");
        wcfg.program = std::make_shared<const Program>(std::move(*parsed.program));
        wcfg.shots = 1;
        wcfg.master_seed = cfg.master_seed;
        wcfg.workload_name = "repcode";
        std::string inj = cfg.injected_error
                              ? std::to_string(cfg.injected_error->first) + ":" +
                                    std::to_string(cfg.injected_error->second)
                              : "none";
        wcfg.metadata = {{"workload", "repcode"},
                         {"rounds", std::to_string(cfg.rounds)},
                         {"inject", inj},
                         {"seed", std::to_string(cfg.master_seed)}};

        auto dec = decoder;
        hooks.on_boundary = [dec](ShotRunner& runner, const Boundary& b) {
            const Instruction& ins =
                runner.program().instructions[static_cast<std::size_t>(b.op_index)];
            if (!std::holds_alternative<CheckpointMarkerOp>(ins.op)) return;
            if (!b.region_name.starts_with("round")) return;
            const std::size_t round = dec->syndrome_history.size();
            const auto& regs = runner.context().registers;
            dec->absorb_round(regs.at("s0")[round], regs.at("s1")[round]);
        };
        hooks.enrich_record = [dec](CheckpointRecord& r, const Boundary*) {
            r.ckpt_class = CheckpointClass::Logical;
            r.decoder_state = dec->state();
        };
    }

    RepcodeOutcome finish(RunOutcome run) const {
        RepcodeOutcome out;
        out.pauli_frame = decoder->frame;
        out.syndrome_history = decoder->syndrome_history;
        if (!run.per_shot_registers.empty()) {
            const auto& data = run.per_shot_registers.back().at("data");
            int ones = 0;
            for (int q = 0; q < 3; ++q) {
                int bit = data[static_cast<std::size_t>(q)] ^
                          (decoder->frame[static_cast<std::size_t>(q)] == 'X' ? 1 : 0);
                out.logical_readout.push_back(bit);
                ones += bit;
            }
            out.logical_outcome = ones >= 2 ? 1 : 0;
        }
        nlohmann::json& r = run.report.result;
        r["pauli_frame"] = out.pauli_frame;
        nlohmann::json hist = nlohmann::json::array();
        for (const auto& row : out.syndrome_history) hist.push_back({row[0], row[1]});
        r["syndrome_history"] = hist;
        r["logical_readout"] = out.logical_readout;
        r["logical_outcome"] = out.logical_outcome;
        out.run = std::move(run);
        return out;
    }
};

}  // namespace detail

inline RepcodeOutcome run_repetition_code(const RepcodeConfig& cfg, const Policy& policy,
                                          Store& store,
                                          std::optional<FailureSpec> failure = std::nullopt) {
    detail::RepcodeHarness h(cfg);
    ShotLoopEngine engine(h.wcfg, policy, store, std::move(failure), h.hooks);
    return h.finish(engine.run());
}

inline RepcodeOutcome resume_repetition_code(const RepcodeConfig& cfg,
                                             const CheckpointRecord& record, const Policy& policy,
                                             Store& store,
                                             std::optional<FailureSpec> failure = std::nullopt) {
    detail::RepcodeHarness h(cfg);
    if (record.decoder_state) *h.decoder = RepcodeDecoder::from_state(*record.decoder_state);
    h.wcfg.metadata = record.calibration_metadata;  // keeps reschedule tags
    ShotLoopEngine engine(h.wcfg, policy, store, std::move(failure), h.hooks);
    return h.finish(engine.resume_from(record));
}

}  // namespace qcr
