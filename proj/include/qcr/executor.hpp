#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qcr/errors.hpp"
#include "qcr/program.hpp"
#include "qcr/rng.hpp"
#include "qcr/statevector.hpp"
#include "qcr/transcript.hpp"

namespace qcr {

using Registers = std::map<std::string, std::vector<std::uint8_t>>;

/// Per-shot execution state. The statevector lives here for the duration
/// of the shot only; everything else is classical and checkpointable.
struct ShotContext {
    long shot_index = 0;
    RngStream rng;
    StateVector state;
    Registers registers;
    Transcript transcript;
    std::vector<ControlFlowEvent> control_flow;
    int pc = 0;

    ShotContext(const Program& program, long shot, std::uint64_t shot_seed)
        : shot_index(shot), rng{shot_seed, 0}, state(program.num_qubits) {
        for (const auto& c : program.cregs)
            registers[c.name] = std::vector<std::uint8_t>(static_cast<std::size_t>(c.width), 0);
    }
};

/// Steps a validated Program one instruction at a time. While a pinned
/// transcript prefix lasts, measurements and resets are forced to the
/// recorded outcomes; afterwards they sample freely. Either way each
/// measuring op consumes exactly one RNG draw.
class ShotRunner {
public:
    ShotRunner(const Program& program, long shot_index, std::uint64_t shot_seed,
               Transcript pinned = {})
        : program_(&program), ctx_(program, shot_index, shot_seed), pinned_(std::move(pinned)) {}

    bool done() const { return ctx_.pc >= static_cast<int>(program_->instructions.size()); }
    const ShotContext& context() const { return ctx_; }
    ShotContext& context() { return ctx_; }
    const Program& program() const { return *program_; }
    std::size_t pinned_remaining() const { return pinned_.size() - pinned_pos_; }

    void step() {
        const Instruction& ins = program_->instructions[ctx_.pc];
        if (ins.guard) {
            const bool taken = register_bit(ins.guard->creg, ins.guard->bit) == ins.guard->value;
            ctx_.control_flow.push_back({ins.op_index, taken});
            if (taken) execute(ins);
        } else {
            execute(ins);
        }
        ++ctx_.pc;
    }

    /// Executes instructions while pc < op_index.
    void run_to(int op_index) {
        while (!done() && ctx_.pc < op_index) step();
    }

    void run() {
        while (!done()) step();
    }

private:
    int register_bit(const std::string& creg, int bit) const {
        auto it = ctx_.registers.find(creg);
        return it->second[static_cast<std::size_t>(bit)];
    }

    int measure_or_forced(int op_index, int qubit, bool& forced) {
        if (pinned_pos_ < pinned_.size()) {
            const MeasurementEvent& ev = pinned_[pinned_pos_];
            if (ev.op_index != op_index || ev.qubit != qubit)
                throw TranscriptOrderMismatch(
                    "pinned event expects op " + std::to_string(ev.op_index) + " qubit " +
                    std::to_string(ev.qubit) + " but execution reached op " + std::to_string(op_index) +
                    " qubit " + std::to_string(qubit));
            ++pinned_pos_;
            ctx_.state.force_measure(qubit, ev.outcome, ctx_.rng);
            forced = true;
            return ev.outcome;
        }
        forced = false;
        return ctx_.state.measure(qubit, ctx_.rng);
    }

    void execute(const Instruction& ins) {
        if (const auto* g = std::get_if<GateOp>(&ins.op)) {
            ctx_.state.apply_gate(g->name, g->qubits, g->params);
        } else if (const auto* m = std::get_if<MeasureOp>(&ins.op)) {
            bool forced = false;
            int outcome = measure_or_forced(ins.op_index, m->qubit, forced);
            ctx_.registers[m->creg][static_cast<std::size_t>(m->bit)] =
                static_cast<std::uint8_t>(outcome);
            ctx_.transcript.push_back({ctx_.shot_index, ins.op_index, m->qubit, outcome, forced});
        } else if (const auto* r = std::get_if<ResetOp>(&ins.op)) {
            bool forced = false;
            int bit = measure_or_forced(ins.op_index, r->qubit, forced);
            if (bit == 1) {
                const int q[1] = {r->qubit};
                ctx_.state.apply_gate("x", q, {});
            }
            ctx_.transcript.push_back({ctx_.shot_index, ins.op_index, r->qubit, bit, forced});
        }
        // RegionStart and CheckpointMarker are structural no-ops.
    }

    const Program* program_;
    ShotContext ctx_;
    Transcript pinned_;
    std::size_t pinned_pos_ = 0;
};

/// Executes one complete shot. Pinned events (if any) must cover a prefix
/// of the shot's measurements in program order.
inline ShotContext run_shot(const Program& program, long shot_index, std::uint64_t shot_seed,
                            Transcript pinned = {}) {
    ShotRunner runner(program, shot_index, shot_seed, std::move(pinned));
    runner.run();
    if (runner.pinned_remaining() != 0)
        throw TranscriptOrderMismatch("pinned transcript has " +
                                      std::to_string(runner.pinned_remaining()) +
                                      " event(s) past the end of the shot");
    return std::move(runner.context());
}

}  // namespace qcr
