// qcr: checkpointed execution of dynamic-circuit workloads.
//
// Exit codes:
//   0 success
//   1 program/config parse or validation error
//   2 storage error
//   3 injected failure struck (checkpoints persisted)
//   4 program digest mismatch on restore
//   5 checkpoint not found / empty store
//   6 store verification failure

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "qcr/qcr.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 1;
constexpr int kExitStorage = 2;
constexpr int kExitInjectedFailure = 3;
constexpr int kExitProgramMismatch = 4;
constexpr int kExitNotFound = 5;
constexpr int kExitVerifyFailed = 6;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw qcr::StorageIO("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit_report(const qcr::RunReport& report, const std::string& out_path) {
    std::string text = report.to_json().dump(2);
    if (out_path.empty()) {
        std::cout << text << "\n";
    } else {
        std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
        out << text << "\n";
        if (!out) throw qcr::StorageIO("cannot write report to " + out_path);
    }
}

struct CommonFlags {
    std::string ckpt_dir;
    std::string policy = "region";
    std::string fail_at;
    std::string on_failure = "rollback";
    std::string out_path;
    std::uint64_t seed = 0;
};

void add_common(CLI::App* cmd, CommonFlags& f, bool with_seed = true) {
    cmd->add_option("--ckpt-dir", f.ckpt_dir, "checkpoint store directory")
        ->envname("QCR_CKPT_DIR")
        ->required();
    cmd->add_option("--policy", f.policy,
                    "triggers: iter|region|shots:K|conv:TOL|event (comma-joined)");
    cmd->add_option("--fail-at", f.fail_at, "inject failure: op:REGION:OP|shot:K|iter:I");
    cmd->add_option("--on-failure", f.on_failure, "rollback|restart|reschedule")
        ->check(CLI::IsMember({"rollback", "restart", "reschedule"}));
    cmd->add_option("--out", f.out_path, "write the run report here instead of stdout");
    if (with_seed) cmd->add_option("--seed", f.seed, "master seed (default 0)");
}

qcr::Policy build_policy(const CommonFlags& f) {
    qcr::Policy p = qcr::Policy::parse(f.policy);
    if (f.on_failure == "restart")
        p.on_failure = qcr::FailureAction::Restart;
    else if (f.on_failure == "reschedule")
        p.on_failure = qcr::FailureAction::Reschedule;
    return p;
}

std::optional<qcr::FailureSpec> build_failure(const CommonFlags& f) {
    if (f.fail_at.empty()) return std::nullopt;
    return qcr::FailureSpec::parse(f.fail_at);
}

int finish_run(qcr::RunOutcome outcome, const CommonFlags& f) {
    emit_report(outcome.report, f.out_path);
    return outcome.report.injected_failure_hit ? kExitInjectedFailure : kExitOk;
}

int classify_error(const std::exception& e) {
    if (dynamic_cast<const qcr::ProgramMismatch*>(&e)) return kExitProgramMismatch;
    if (dynamic_cast<const qcr::NotFound*>(&e)) return kExitNotFound;
    if (dynamic_cast<const qcr::StorageIO*>(&e)) return kExitStorage;
    if (dynamic_cast<const qcr::SchemaError*>(&e)) return kExitStorage;
    if (dynamic_cast<const qcr::DigestMismatch*>(&e)) return kExitStorage;
    if (dynamic_cast<const qcr::VersionUnsupported*>(&e)) return kExitStorage;
    return kExitParse;
}

qcr::CheckpointRecord load_record(qcr::Store& store, const std::string& id_flag) {
    std::string id;
    if (!id_flag.empty()) {
        id = id_flag;
    } else {
        auto latest = store.latest();
        if (!latest) throw qcr::NotFound("store is empty");
        id = *latest;
    }
    return store.get(id);
}

/// For workloads whose program is regenerated from config: digest check
/// plus pinned replay of the in-flight shot, with register comparison.
void verify_generated(const qcr::CheckpointRecord& record, const std::string& program_text) {
    auto parsed = qcr::parse_program(program_text);
    if (!parsed.ok()) throw qcr::ProgramMismatch("regenerated program does not parse");
    auto plan = qcr::plan_restoration(record, *parsed.program);
    if (plan.mode == qcr::RestorationMode::TranscriptReplay && record.shot_cursor.in_flight_shot) {
        auto ctx = qcr::replay_to_boundary(*parsed.program, record,
                                           *record.shot_cursor.in_flight_shot);
        if (ctx.registers != record.registers)
            throw qcr::TranscriptOrderMismatch("replayed registers disagree with record " +
                                               record.checkpoint_id);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"checkpointed quantum workflow runtime"};
    app.require_subcommand(1);

    // --- run ---
    CommonFlags run_f;
    std::string run_program;
    long run_shots = 1;
    auto* cmd_run = app.add_subcommand("run", "run a .qdc program with checkpointing");
    cmd_run->add_option("--program", run_program, "program file (.qdc)")->required();
    cmd_run->add_option("--shots", run_shots, "number of shots");
    add_common(cmd_run, run_f);

    // --- resume ---
    CommonFlags res_f;
    std::string res_program, res_checkpoint;
    auto* cmd_resume = app.add_subcommand("resume", "resume a workload from its checkpoint store");
    cmd_resume->add_option("--program", res_program, "program file (required for 'run' workloads)");
    cmd_resume->add_option("--checkpoint", res_checkpoint, "resume from this id (default: latest)");
    add_common(cmd_resume, res_f, /*with_seed=*/false);

    // --- verify ---
    std::string ver_dir, ver_program;
    auto* cmd_verify = app.add_subcommand("verify", "re-verify digests and replay every checkpoint");
    cmd_verify->add_option("--ckpt-dir", ver_dir, "checkpoint store directory")
        ->envname("QCR_CKPT_DIR")
        ->required();
    cmd_verify->add_option("--program", ver_program, "program file (required for 'run' workloads)");

    // --- info ---
    std::string info_dir;
    auto* cmd_info = app.add_subcommand("info", "list checkpoints and lineage");
    cmd_info->add_option("--ckpt-dir", info_dir, "checkpoint store directory")
        ->envname("QCR_CKPT_DIR")
        ->required();

    // --- vqe ---
    CommonFlags vqe_f;
    std::string vqe_ham = "1*ZZ";
    int vqe_qubits = 2, vqe_depth = 1;
    double vqe_lr = 0.2, vqe_tol = 1e-9, vqe_init = 0.1;
    long vqe_iters = 200;
    auto* cmd_vqe = app.add_subcommand("vqe", "variational eigensolver workload");
    cmd_vqe->add_option("--ham", vqe_ham, "Hamiltonian, e.g. 1*ZZ,-0.5*XI");
    cmd_vqe->add_option("--qubits", vqe_qubits, "qubit count (<= 4)");
    cmd_vqe->add_option("--depth", vqe_depth, "ansatz depth");
    cmd_vqe->add_option("--lr", vqe_lr, "gradient-descent learning rate");
    cmd_vqe->add_option("--iters", vqe_iters, "max iterations");
    cmd_vqe->add_option("--tol", vqe_tol, "energy-change stopping tolerance");
    cmd_vqe->add_option("--init", vqe_init, "initial value for every parameter");
    add_common(cmd_vqe, vqe_f);

    // --- falqon ---
    CommonFlags fal_f;
    std::string fal_hp = "1*ZZ", fal_hd = "1*XI,1*IX";
    int fal_qubits = 2;
    double fal_dt = 0.01;
    long fal_steps = 50;
    auto* cmd_falqon = app.add_subcommand("falqon", "feedback-based optimization workload");
    cmd_falqon->add_option("--hp", fal_hp, "problem Hamiltonian");
    cmd_falqon->add_option("--hd", fal_hd, "driver Hamiltonian");
    cmd_falqon->add_option("--qubits", fal_qubits, "qubit count (<= 3)");
    cmd_falqon->add_option("--dt", fal_dt, "time step");
    cmd_falqon->add_option("--steps", fal_steps, "layer count");
    add_common(cmd_falqon, fal_f);

    // --- ghz ---
    CommonFlags ghz_f;
    int ghz_n = 3;
    long ghz_shots = 8;
    auto* cmd_ghz = app.add_subcommand("ghz", "constant-depth GHZ preparation workload");
    cmd_ghz->add_option("--n", ghz_n, "GHZ width (3..5)");
    cmd_ghz->add_option("--shots", ghz_shots, "shots");
    add_common(cmd_ghz, ghz_f);

    // --- reuse ---
    CommonFlags reuse_f;
    long reuse_shots = 16;
    int reuse_qubits = 2;
    auto* cmd_reuse = app.add_subcommand("reuse", "qubit-reuse chain workload");
    cmd_reuse->add_option("--shots", reuse_shots, "shots");
    cmd_reuse->add_option("--qubits", reuse_qubits, "physical qubit count (>= 2)");
    add_common(cmd_reuse, reuse_f);

    // --- repcode ---
    CommonFlags rep_f;
    long rep_rounds = 5;
    std::string rep_inject;
    auto* cmd_repcode = app.add_subcommand("repcode", "repetition-code syndrome workload");
    cmd_repcode->add_option("--rounds", rep_rounds, "syndrome rounds");
    cmd_repcode->add_option("--inject", rep_inject, "inject X error at ROUND:QUBIT");
    add_common(cmd_repcode, rep_f);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Map every flag/usage problem onto the documented parse-error
        // code; --help stays 0.
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitParse;
    }

    try {
        if (*cmd_run) {
            qcr::ProgramWorkload w{read_file(run_program), run_shots, run_f.seed};
            qcr::Store store(run_f.ckpt_dir);
            return finish_run(
                qcr::run_program_workload(w, build_policy(run_f), store, build_failure(run_f)),
                run_f);
        }

        if (*cmd_resume) {
            qcr::Store store(res_f.ckpt_dir);
            bool degraded = false;
            qcr::FailureAction action =
                qcr::resolve_failure_action(build_policy(res_f), store, degraded);
            if (degraded) {
                // Rollback requested but nothing to roll back to.
                throw qcr::NotFound("store is empty; nothing to resume (restart required)");
            }
            auto record = load_record(store, res_checkpoint);
            std::optional<std::string> text;
            if (!res_program.empty()) text = read_file(res_program);
            qcr::RunOutcome outcome;
            if (action == qcr::FailureAction::Restart) {
                outcome = qcr::run_workflow(qcr::workload_from_record(record, text),
                                            build_policy(res_f), store, build_failure(res_f));
                outcome.report.failures.push_back({"restart-policy", "resume", "restart"});
            } else {
                if (action == qcr::FailureAction::Reschedule)
                    record.calibration_metadata["backend"] = "rescheduled";
                outcome = qcr::resume_workflow(record, build_policy(res_f), store, text,
                                               build_failure(res_f));
            }
            emit_report(outcome.report, res_f.out_path);
            return outcome.report.injected_failure_hit ? kExitInjectedFailure : kExitOk;
        }

        if (*cmd_verify) {
            qcr::Store store(ver_dir);
            auto latest = store.latest();
            if (!latest) throw qcr::NotFound("store is empty");
            std::optional<std::string> text;
            if (!ver_program.empty()) text = read_file(ver_program);
            try {
                for (const auto& id : store.lineage(*latest)) {
                    qcr::CheckpointRecord record = store.get(id);  // digest re-verified here
                    qcr::WorkloadConfig workload = qcr::workload_from_record(record, text);
                    if (const auto* pw = std::get_if<qcr::ProgramWorkload>(&workload)) {
                        verify_generated(record, pw->source_text);
                    } else if (const auto* g = std::get_if<qcr::GhzConfig>(&workload)) {
                        verify_generated(record, g->program_text());
                    } else if (const auto* ru = std::get_if<qcr::ReuseConfig>(&workload)) {
                        verify_generated(record, ru->program_text());
                    } else if (const auto* rc = std::get_if<qcr::RepcodeConfig>(&workload)) {
                        verify_generated(record, rc->program_text());
                    } else if (const auto* v = std::get_if<qcr::VqeConfig>(&workload)) {
                        qcr::plan_restoration_algorithmic(record,
                                                          qcr::sha256_hex(v->canonical_text()));
                        qcr::VqeState::unpack(*v, record.parameters, record.iteration);
                    } else if (const auto* fq = std::get_if<qcr::FalqonConfig>(&workload)) {
                        qcr::plan_restoration_algorithmic(record,
                                                          qcr::sha256_hex(fq->canonical_text()));
                        qcr::falqon_rehydrate(*fq, record.parameters, record.iteration);
                    }
                    std::cout << "ok " << id << "\n";
                }
            } catch (const std::exception& e) {
                std::cerr << "verification failed: " << e.what() << "\n";
                return kExitVerifyFailed;
            }
            return kExitOk;
        }

        if (*cmd_info) {
            qcr::Store store(info_dir);
            auto ids = store.list();
            auto latest = store.latest();
            std::cout << "store: " << info_dir << "\n";
            std::cout << "records: " << ids.size() << "\n";
            if (latest) {
                std::cout << "latest: " << *latest << "\n";
                std::cout << "lineage:\n";
                for (const auto& id : store.lineage(*latest)) {
                    auto r = store.get(id);
                    std::cout << "  " << id.substr(0, 12)
                              << "  class=" << qcr::to_string(r.ckpt_class)
                              << " iter=" << r.iteration
                              << " shots=" << r.shot_cursor.completed_shots << "/"
                              << r.shot_cursor.shots_total << " pos=(r" << r.position.region_index
                              << ",op" << r.position.op_index << ") events=" << r.transcript.size()
                              << "\n";
                }
            }
            return kExitOk;
        }

        if (*cmd_vqe) {
            qcr::VqeConfig cfg;
            cfg.hamiltonian = qcr::parse_pauli_sum(vqe_ham);
            cfg.num_qubits = vqe_qubits;
            cfg.depth = vqe_depth;
            cfg.learning_rate = vqe_lr;
            cfg.max_iterations = vqe_iters;
            cfg.tolerance = vqe_tol;
            cfg.initial_parameter = vqe_init;
            cfg.master_seed = vqe_f.seed;
            qcr::Store store(vqe_f.ckpt_dir);
            return finish_run(qcr::run_vqe(cfg, build_policy(vqe_f), store, build_failure(vqe_f)),
                              vqe_f);
        }

        if (*cmd_falqon) {
            qcr::FalqonConfig cfg;
            cfg.hp = qcr::parse_pauli_sum(fal_hp);
            cfg.hd = qcr::parse_pauli_sum(fal_hd);
            cfg.num_qubits = fal_qubits;
            cfg.dt = fal_dt;
            cfg.steps = fal_steps;
            qcr::Store store(fal_f.ckpt_dir);
            return finish_run(
                qcr::run_falqon(cfg, build_policy(fal_f), store, build_failure(fal_f)), fal_f);
        }

        if (*cmd_ghz) {
            qcr::GhzConfig cfg{ghz_n, ghz_shots, ghz_f.seed};
            qcr::Store store(ghz_f.ckpt_dir);
            return finish_run(
                qcr::run_ghz_prep(cfg, build_policy(ghz_f), store, build_failure(ghz_f)).run,
                ghz_f);
        }

        if (*cmd_reuse) {
            qcr::ReuseConfig cfg{reuse_shots, reuse_f.seed, reuse_qubits};
            qcr::Store store(reuse_f.ckpt_dir);
            return finish_run(
                qcr::run_qubit_reuse_demo(cfg, build_policy(reuse_f), store,
                                          build_failure(reuse_f)),
                reuse_f);
        }

        if (*cmd_repcode) {
            qcr::RepcodeConfig cfg;
            cfg.rounds = rep_rounds;
            cfg.master_seed = rep_f.seed;
            if (!rep_inject.empty()) {
                auto colon = rep_inject.find(':');
                auto r = colon == std::string::npos
                             ? std::nullopt
                             : qcr::detail::parse_int(rep_inject.substr(0, colon));
                auto q = colon == std::string::npos
                             ? std::nullopt
                             : qcr::detail::parse_int(rep_inject.substr(colon + 1));
                if (!r || !q) throw qcr::ConfigError("--inject expects ROUND:QUBIT");
                cfg.injected_error = {{*r, static_cast<int>(*q)}};
            }
            qcr::Store store(rep_f.ckpt_dir);
            return finish_run(
                qcr::run_repetition_code(cfg, build_policy(rep_f), store, build_failure(rep_f))
                    .run,
                rep_f);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return classify_error(e);
    }
    return kExitOk;
}
