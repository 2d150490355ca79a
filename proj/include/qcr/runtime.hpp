#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "qcr/errors.hpp"
#include "qcr/executor.hpp"
#include "qcr/policy.hpp"
#include "qcr/program.hpp"
#include "qcr/report.hpp"
#include "qcr/restoration.hpp"
#include "qcr/store.hpp"

namespace qcr {

namespace detail {

inline double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

/// Internal signal: the injected failure struck. Caught by the engines,
/// which then return the partial report the way a post-crash inspection
/// of the store would see it.
struct KillSignal {
    std::string position;
};

}  // namespace detail

/// Appends records to the store as a parent-linked chain and accounts
/// creation time per record.
class CheckpointWriter {
public:
    CheckpointWriter(Store& store, RunReport& report, std::optional<std::string> parent)
        : store_(&store), report_(&report), parent_(std::move(parent)) {}

    std::string commit(CheckpointRecord record) {
        record.parent_id = parent_;
        auto t0 = std::chrono::steady_clock::now();
        std::string id = store_->put(std::move(record));
        report_->checkpoint_ids.push_back(id);
        report_->checkpoint_timings.push_back({id, detail::ms_since(t0)});
        parent_ = id;
        return id;
    }

    const std::optional<std::string>& parent() const { return parent_; }

private:
    Store* store_;
    RunReport* report_;
    std::optional<std::string> parent_;
};

/// Final registers of one completed shot, rebuilt from its recorded
/// measurement events. Bits never measured stay zero, exactly as in a
/// live execution.
inline Registers registers_from_transcript(const Program& program, const Transcript& transcript,
                                           long shot) {
    Registers regs;
    for (const auto& c : program.cregs)
        regs[c.name] = std::vector<std::uint8_t>(static_cast<std::size_t>(c.width), 0);
    for (const auto& ev : transcript) {
        if (ev.shot_index != shot) continue;
        const Instruction& ins = program.instructions[static_cast<std::size_t>(ev.op_index)];
        if (const auto* m = std::get_if<MeasureOp>(&ins.op))
            regs[m->creg][static_cast<std::size_t>(m->bit)] = static_cast<std::uint8_t>(ev.outcome);
    }
    return regs;
}

/// Workload integration points for the shot-loop engine.
struct WorkloadHooks {
    /// Runs at every checkpointable boundary crossing, before any
    /// checkpoint is cut there (decoders update here).
    std::function<void(ShotRunner&, const Boundary&)> on_boundary;
    /// Lets the workload enrich a record about to be committed.
    std::function<void(CheckpointRecord&, const Boundary*)> enrich_record;
    std::function<void(const ShotContext&)> on_shot_complete;
};

struct ShotWorkloadConfig {
    std::shared_ptr<const Program> program;
    long shots = 1;
    std::uint64_t master_seed = 0;
    std::string workload_name = "program";
    std::map<std::string, std::string> metadata;
};

struct RunOutcome {
    RunReport report;
    Transcript transcript;
    std::vector<Registers> per_shot_registers;
};

/// Orchestrates a shot-loop workload: executes shots, cuts checkpoints
/// per policy, injects failures at exact points, and rebuilds in-flight
/// work on resume.
class ShotLoopEngine {
public:
    ShotLoopEngine(ShotWorkloadConfig config, Policy policy, Store& store,
                   std::optional<FailureSpec> failure = std::nullopt, WorkloadHooks hooks = {})
        : cfg_(std::move(config)),
          policy_(std::move(policy)),
          store_(&store),
          failure_(std::move(failure)),
          hooks_(std::move(hooks)),
          boundaries_(region_boundaries(*cfg_.program)) {
        policy_.validate();
        validate_failure_spec();
    }

    RunOutcome run() {
        return drive(0, std::nullopt, {}, std::nullopt, false, 0.0);
    }

    RunOutcome resume_from(const CheckpointRecord& record) {
        auto t0 = std::chrono::steady_clock::now();
        RuntimeState state = qcr::resume(record, *cfg_.program);
        double restore_ms = detail::ms_since(t0);
        return drive(record.shot_cursor.completed_shots, std::move(state.in_flight),
                     record.transcript, record.checkpoint_id, true, restore_ms);
    }

private:
    void validate_failure_spec() {
        if (!failure_) return;
        switch (failure_->kind) {
            case FailureSpec::Kind::KillAtShot:
                if (failure_->shot < 0 || failure_->shot > cfg_.shots)
                    throw SpecOutOfRange("kill shot " + std::to_string(failure_->shot) +
                                         " outside [0, " + std::to_string(cfg_.shots) + "]");
                break;
            case FailureSpec::Kind::KillAtOp: {
                int ri = cfg_.program->find_region(failure_->region);
                if (ri < 0) throw SpecOutOfRange("kill region '" + failure_->region + "' not found");
                const RegionDescriptor& r = cfg_.program->regions[static_cast<std::size_t>(ri)];
                if (failure_->op < r.start_op || failure_->op >= r.end_op)
                    throw SpecOutOfRange("kill op " + std::to_string(failure_->op) +
                                         " outside region '" + failure_->region + "'");
                if (failure_->shot < 0 || failure_->shot >= cfg_.shots)
                    throw SpecOutOfRange("kill op shot " + std::to_string(failure_->shot) +
                                         " outside [0, " + std::to_string(cfg_.shots) + ")");
                break;
            }
            default:
                throw SpecOutOfRange("failure spec '" + failure_->describe() +
                                     "' does not apply to a shot workload");
        }
    }

    CheckpointClass class_for_boundary(const Boundary* b) const {
        if (b) {
            const Instruction& ins =
                cfg_.program->instructions[static_cast<std::size_t>(b->op_index)];
            if (const auto* marker = std::get_if<CheckpointMarkerOp>(&ins.op))
                if (marker->class_hint) return *marker->class_hint;
        }
        return policy_.default_class;
    }

    RunOutcome drive(long completed, std::optional<ShotRunner> in_flight, Transcript base,
                     std::optional<std::string> parent, bool resumed, double restore_ms) {
        auto t_start = std::chrono::steady_clock::now();
        RunOutcome out;
        RunReport& rep = out.report;
        rep.workload = cfg_.workload_name;
        rep.master_seed = cfg_.master_seed;
        rep.resumed = resumed;
        if (resumed && parent) rep.resumed_from = *parent;
        rep.restore_ms = restore_ms;
        rep.shots_replayed = in_flight ? 1 : 0;

        out.transcript = std::move(base);
        for (long s = 0; s < completed; ++s)
            out.per_shot_registers.push_back(
                registers_from_transcript(*cfg_.program, out.transcript, s));

        CheckpointWriter writer(*store_, rep, std::move(parent));

        // Events of the current (replayed) shot already present in the base
        // transcript; the runner re-produced them with forced flags set.
        std::size_t replay_overlap = 0;

        auto cut_checkpoint = [&](long shot, std::optional<long> in_flight_shot,
                                  const Boundary* b, const ShotRunner* runner) {
            CheckpointRecord r;
            r.ckpt_class = class_for_boundary(b);
            r.program_digest = cfg_.program->source_digest;
            if (b)
                r.position = {cfg_.program->region_of(b->op_index), b->op_index};
            else if (!boundaries_.empty())
                r.position = {cfg_.program->region_of(boundaries_[0].op_index),
                              boundaries_[0].op_index};
            r.shot_cursor = {shot, cfg_.shots, in_flight_shot};
            r.master_seed = cfg_.master_seed;
            if (runner) {
                r.registers = runner->context().registers;
                r.transcript = out.transcript;
                r.transcript.insert(r.transcript.end(),
                                    runner->context().transcript.begin() +
                                        static_cast<std::ptrdiff_t>(replay_overlap),
                                    runner->context().transcript.end());
                r.control_flow = runner->context().control_flow;
            } else {
                r.transcript = out.transcript;
            }
            r.calibration_metadata = cfg_.metadata;
            if (hooks_.enrich_record) hooks_.enrich_record(r, b);
            writer.commit(std::move(r));
        };

        auto die = [&](const std::string& position, long completed_now,
                       const ShotRunner* runner, const Boundary* b,
                       bool checkpointable_point) {
            if (policy_.on_event && checkpointable_point)
                cut_checkpoint(completed_now,
                               runner ? std::optional<long>(runner->context().shot_index)
                                      : std::nullopt,
                               b, runner);
            throw detail::KillSignal{position};
        };

        auto kill_at_shot_boundary = [&](long boundary) {
            return failure_ && failure_->kind == FailureSpec::Kind::KillAtShot &&
                   failure_->shot == boundary;
        };

        try {
            if (completed == 0 && !in_flight && kill_at_shot_boundary(0))
                die("shot:0", 0, nullptr, nullptr, false);

            const long end_op = static_cast<long>(cfg_.program->instructions.size());
            for (long shot = completed; shot < cfg_.shots; ++shot) {
                // Replayed runners resume past their checkpoint boundary;
                // fresh runners start before op 0.
                const bool is_replayed = in_flight.has_value();
                ShotRunner runner = is_replayed
                                        ? std::move(*std::exchange(in_flight, std::nullopt))
                                        : ShotRunner(*cfg_.program, shot,
                                                     derive_shot_seed(cfg_.master_seed, shot));
                // Boundaries at or before a replayed runner's position were
                // handled before the failure.
                const int skip_op = is_replayed ? runner.context().pc : -1;
                std::size_t bi = 0;
                while (bi < boundaries_.size() && boundaries_[bi].op_index <= skip_op) ++bi;

                replay_overlap = 0;
                if (is_replayed)
                    for (const auto& ev : out.transcript)
                        if (ev.shot_index == shot) ++replay_overlap;

                const bool op_kill_this_shot = failure_ &&
                                               failure_->kind == FailureSpec::Kind::KillAtOp &&
                                               failure_->shot == shot && failure_->op > skip_op;
                const std::string op_kill_pos =
                    failure_ ? "op:" + failure_->region + ":" + std::to_string(failure_->op) : "";

                while (true) {
                    const Boundary* next_b = bi < boundaries_.size() ? &boundaries_[bi] : nullptr;
                    const long boundary_op = next_b ? next_b->op_index : end_op;
                    const long kill_op = op_kill_this_shot && failure_->op >= runner.context().pc
                                             ? failure_->op
                                             : end_op + 1;
                    if (kill_op < boundary_op) {
                        runner.run_to(static_cast<int>(kill_op));
                        die(op_kill_pos, shot, &runner, nullptr, false);
                    }
                    if (!next_b) break;
                    runner.run_to(static_cast<int>(boundary_op));
                    if (hooks_.on_boundary) hooks_.on_boundary(runner, *next_b);
                    const bool cut = policy_.region_boundary;
                    if (cut) cut_checkpoint(shot, shot, next_b, &runner);
                    ++bi;
                    if (kill_op == boundary_op)
                        die(op_kill_pos, shot, &runner, next_b, !cut);
                }
                runner.run();

                const ShotContext& ctx = runner.context();
                // A replayed shot's pre-boundary events are already in the
                // base transcript (with their original flags); append only
                // what ran past the boundary.
                out.transcript.insert(out.transcript.end(),
                                      ctx.transcript.begin() +
                                          static_cast<std::ptrdiff_t>(replay_overlap),
                                      ctx.transcript.end());
                replay_overlap = 0;
                out.per_shot_registers.push_back(ctx.registers);
                rep.shots_executed++;
                if (hooks_.on_shot_complete) hooks_.on_shot_complete(ctx);

                const long now_completed = shot + 1;
                const bool cut_here =
                    policy_.every_k_shots && now_completed % *policy_.every_k_shots == 0;
                if (cut_here) cut_checkpoint(now_completed, std::nullopt, nullptr, nullptr);
                if (kill_at_shot_boundary(now_completed))
                    die("shot:" + std::to_string(now_completed), now_completed, nullptr, nullptr,
                        !cut_here);
            }
        } catch (const detail::KillSignal& kill) {
            rep.injected_failure_hit = true;
            rep.failures.push_back({failure_ ? failure_->describe() : "unknown", kill.position,
                                    "terminated"});
        }

        assemble_result(out);
        rep.total_ms = detail::ms_since(t_start);
        return out;
    }

    void assemble_result(RunOutcome& out) {
        nlohmann::json& result = out.report.result;
        result["shots_total"] = cfg_.shots;
        result["shots_recorded"] = static_cast<long>(out.per_shot_registers.size());
        nlohmann::json counts = nlohmann::json::object();
        std::map<std::string, long> histogram;
        for (const auto& regs : out.per_shot_registers) histogram[registers_key(regs)]++;
        for (const auto& [k, v] : histogram) counts[k] = v;
        result["register_counts"] = counts;
        if (!out.per_shot_registers.empty()) {
            nlohmann::json fin = nlohmann::json::object();
            for (const auto& [name, bits] : out.per_shot_registers.back()) {
                std::string s;
                for (auto b : bits) s.push_back(b ? '1' : '0');
                fin[name] = s;
            }
            result["final_registers"] = fin;
        }
        result["transcript_sha256"] = transcript_digest(out.transcript);
        result["transcript_events"] = static_cast<long>(out.transcript.size());
    }

    ShotWorkloadConfig cfg_;
    Policy policy_;
    Store* store_;
    std::optional<FailureSpec> failure_;
    WorkloadHooks hooks_;
    std::vector<Boundary> boundaries_;
};

/// One phase-structured (iterative) workload driver, expressed as
/// callbacks so VQE and FALQON share the same checkpoint/restore engine.
struct IterationDriver {
    std::string workload_name;
    std::string config_text;  // canonical config; its digest binds checkpoints
    std::map<std::string, std::string> metadata;
    long max_iterations = 0;
    /// Executes iteration k (1-based) and returns its energy.
    std::function<double(long)> step;
    /// Parameter vector snapshot stored in the checkpoint after iteration k.
    std::function<std::vector<double>()> snapshot;
    /// Driver-level convergence: stop after iteration k?
    std::function<bool(long)> should_stop;
    /// Workload result fields appended to the report.
    std::function<void(nlohmann::json&, bool converged, long iterations)> finalize;
};

/// Algorithmic (phase-boundary) checkpointing around an IterationDriver.
class IterationEngine {
public:
    IterationEngine(IterationDriver driver, Policy policy, Store& store,
                    std::optional<FailureSpec> failure = std::nullopt)
        : driver_(std::move(driver)),
          policy_(std::move(policy)),
          store_(&store),
          failure_(std::move(failure)) {
        policy_.validate();
        if (failure_) {
            if (failure_->kind == FailureSpec::Kind::KillAtIteration) {
                if (failure_->iteration < 0 || failure_->iteration > driver_.max_iterations)
                    throw SpecOutOfRange("kill iteration " + std::to_string(failure_->iteration) +
                                         " outside [0, " + std::to_string(driver_.max_iterations) +
                                         "]");
            } else if (failure_->kind == FailureSpec::Kind::BackendUnavailable) {
                if (failure_->iter_lo < 1 || failure_->iter_hi > driver_.max_iterations)
                    throw SpecOutOfRange("backend window outside workload bounds");
            } else {
                throw SpecOutOfRange("failure spec '" + failure_->describe() +
                                     "' does not apply to an iteration workload");
            }
        }
    }

    std::string config_digest() const { return sha256_hex(driver_.config_text); }

    RunOutcome run() { return drive(0, {}, std::nullopt, false, 0.0); }

    /// The caller must already have rehydrated the driver state from the
    /// record; this seeds the engine's energy history and parent chain.
    RunOutcome resume_from(const CheckpointRecord& record, std::vector<double> energies,
                           double restore_ms) {
        return drive(record.iteration, std::move(energies), record.checkpoint_id, true, restore_ms);
    }

private:
    RunOutcome drive(long start_iteration, std::vector<double> energies,
                     std::optional<std::string> parent, bool resumed, double restore_ms) {
        auto t_start = std::chrono::steady_clock::now();
        RunOutcome out;
        RunReport& rep = out.report;
        rep.workload = driver_.workload_name;
        rep.resumed = resumed;
        if (resumed && parent) rep.resumed_from = *parent;
        rep.restore_ms = restore_ms;

        CheckpointWriter writer(*store_, rep, std::move(parent));
        const std::string digest = config_digest();

        auto cut_checkpoint = [&](long k) {
            CheckpointRecord r;
            r.ckpt_class = CheckpointClass::Algorithmic;
            r.program_digest = digest;
            r.position = {0, 0};
            r.shot_cursor = {0, 0, std::nullopt};
            r.master_seed = 0;
            r.iteration = k;
            r.parameters = driver_.snapshot();
            r.calibration_metadata = driver_.metadata;
            writer.commit(std::move(r));
        };

        bool converged = false;
        long k = start_iteration;
        try {
            if (failure_ && failure_->kind == FailureSpec::Kind::KillAtIteration &&
                failure_->iteration == 0 && !resumed)
                throw detail::KillSignal{"iter:0"};

            // A record cut at the exact convergence point must not trigger
            // extra iterations on resume.
            if (resumed && k >= 1 && driver_.should_stop && driver_.should_stop(k)) converged = true;

            while (!converged && k < driver_.max_iterations) {
                const long next = k + 1;
                if (failure_ && failure_->kind == FailureSpec::Kind::BackendUnavailable &&
                    next >= failure_->iter_lo && next <= failure_->iter_hi)
                    throw detail::KillSignal{"backend-unavailable:iter:" + std::to_string(next)};

                double e = driver_.step(next);
                energies.push_back(e);
                rep.iterations_executed++;
                k = next;

                bool conv_fire = policy_.convergence_tol && energies.size() >= 2 &&
                                 std::abs(energies[energies.size() - 1] -
                                          energies[energies.size() - 2]) < *policy_.convergence_tol;
                bool cut = policy_.iteration_boundary || conv_fire;
                if (cut) cut_checkpoint(k);

                if (failure_ && failure_->kind == FailureSpec::Kind::KillAtIteration &&
                    failure_->iteration == k) {
                    if (policy_.on_event && !cut) cut_checkpoint(k);
                    throw detail::KillSignal{"iter:" + std::to_string(k)};
                }
                if (driver_.should_stop && driver_.should_stop(k)) {
                    converged = true;
                    break;
                }
            }
        } catch (const detail::KillSignal& kill) {
            rep.injected_failure_hit = true;
            rep.failures.push_back({failure_ ? failure_->describe() : "unknown", kill.position,
                                    "terminated"});
        }

        nlohmann::json& result = rep.result;
        result["energies"] = energies;
        result["iterations_completed"] = k;
        if (!energies.empty()) result["final_energy"] = energies.back();
        if (driver_.finalize) driver_.finalize(result, converged, k);
        rep.total_ms = detail::ms_since(t_start);
        return out;
    }

    IterationDriver driver_;
    Policy policy_;
    Store* store_;
    std::optional<FailureSpec> failure_;
};

/// Applies the policy's failure response given the store contents.
/// Rollback with an empty store degrades to Restart, and the degradation
/// is recorded on the report by the caller.
inline FailureAction resolve_failure_action(const Policy& policy, const Store& store,
                                            bool& degraded) {
    degraded = false;
    FailureAction action = policy.on_failure;
    if (action != FailureAction::Restart && store.empty()) {
        degraded = true;
        return FailureAction::Restart;
    }
    return action;
}

}  // namespace qcr
