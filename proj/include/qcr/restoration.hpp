#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "qcr/checkpoint.hpp"
#include "qcr/errors.hpp"
#include "qcr/executor.hpp"
#include "qcr/program.hpp"

namespace qcr {

enum class RestorationMode { TranscriptReplay, AlgorithmicRestart };

/// Deterministic description of how execution will be reconstructed from
/// a checkpoint: replay the in-flight shot with pinned outcomes, or
/// restart the next algorithm phase from rehydrated parameters.
struct RestorationPlan {
    RestorationMode mode = RestorationMode::TranscriptReplay;
    CheckpointRecord checkpoint;
    Position resume_position;
    std::vector<long> shots_to_replay;
    long iteration = 0;
    std::vector<double> parameters;
    Registers registers;
    std::uint64_t master_seed = 0;
};

/// Validates that the record belongs to this exact program text and that
/// its position is a checkpointable boundary, then picks the mode by
/// checkpoint class.
inline RestorationPlan plan_restoration(const CheckpointRecord& record, const Program& program) {
    if (record.program_digest != program.source_digest)
        throw ProgramMismatch("checkpoint was taken against program " + record.program_digest +
                              " but the given source digests to " + program.source_digest);

    const auto boundaries = region_boundaries(program);
    const Boundary* b = find_boundary(boundaries, record.position.op_index);
    if (!b || !b->checkpointable)
        throw BoundaryNotFound("op " + std::to_string(record.position.op_index) +
                               " is not a checkpointable boundary of this program");
    if (program.region_of(record.position.op_index) != record.position.region_index)
        throw BoundaryNotFound("record region index does not contain its op index");

    RestorationPlan plan;
    plan.checkpoint = record;
    plan.resume_position = record.position;
    plan.iteration = record.iteration;
    plan.parameters = record.parameters;
    plan.registers = record.registers;
    plan.master_seed = record.master_seed;
    if (record.ckpt_class == CheckpointClass::Algorithmic) {
        plan.mode = RestorationMode::AlgorithmicRestart;
    } else {
        plan.mode = RestorationMode::TranscriptReplay;
        if (record.shot_cursor.in_flight_shot)
            plan.shots_to_replay.push_back(*record.shot_cursor.in_flight_shot);
    }
    return plan;
}

/// Plan for records that carry no replayable program position
/// (iteration-driver workloads); only the digest binding is checked.
inline RestorationPlan plan_restoration_algorithmic(const CheckpointRecord& record,
                                                    const std::string& config_digest) {
    if (record.program_digest != config_digest)
        throw ProgramMismatch("checkpoint was taken against config " + record.program_digest +
                              " but the given config digests to " + config_digest);
    RestorationPlan plan;
    plan.mode = RestorationMode::AlgorithmicRestart;
    plan.checkpoint = record;
    plan.resume_position = record.position;
    plan.iteration = record.iteration;
    plan.parameters = record.parameters;
    plan.registers = record.registers;
    plan.master_seed = record.master_seed;
    return plan;
}

/// Re-derives the shot seed and re-executes the shot with the record's
/// outcomes pinned, halting at the record position. The returned runner
/// is ready to continue past the boundary; its RNG stream sits exactly
/// where an uninterrupted run's stream would.
inline ShotRunner replay_runner_to_boundary(const Program& program, const CheckpointRecord& record,
                                            long shot) {
    Transcript pinned;
    for (const auto& ev : record.transcript)
        if (ev.shot_index == shot) pinned.push_back(ev);

    ShotRunner runner(program, shot, derive_shot_seed(record.master_seed, shot), std::move(pinned));
    runner.run_to(record.position.op_index);
    if (runner.pinned_remaining() != 0)
        throw TranscriptOrderMismatch("record transcript holds events past its own boundary");
    return runner;
}

inline ShotContext replay_to_boundary(const Program& program, const CheckpointRecord& record,
                                      long shot) {
    ShotRunner runner = replay_runner_to_boundary(program, record, shot);
    return std::move(runner.context());
}

/// Orchestrator state from which execution proceeds as if never
/// interrupted: completed work comes from the record, the in-flight shot
/// (if any) is rebuilt by pinned replay.
struct RuntimeState {
    std::shared_ptr<const Program> program;
    Position position;
    ShotCursor shot_cursor;
    long iteration = 0;
    std::vector<double> parameters;
    Transcript transcript;  // events recorded up to the checkpoint
    std::optional<ShotRunner> in_flight;
    std::uint64_t master_seed = 0;
    std::optional<DecoderState> decoder_state;
    std::string resumed_from;  // checkpoint id
};

inline RuntimeState resume(const CheckpointRecord& record, const Program& program) {
    RestorationPlan plan = plan_restoration(record, program);
    RuntimeState state;
    state.program = std::make_shared<const Program>(program);
    state.position = plan.resume_position;
    state.shot_cursor = record.shot_cursor;
    state.iteration = plan.iteration;
    state.parameters = plan.parameters;
    state.master_seed = plan.master_seed;
    state.decoder_state = record.decoder_state;
    state.resumed_from = record.checkpoint_id;
    state.transcript = record.transcript;
    for (long shot : plan.shots_to_replay)
        state.in_flight.emplace(replay_runner_to_boundary(*state.program, record, shot));
    return state;
}

}  // namespace qcr
