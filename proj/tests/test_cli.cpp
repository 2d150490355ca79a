// Process-level tests of the qcr binary: exit codes, report output,
// kill/resume/verify flows. The binary path arrives via the QCR_BIN
// environment variable set by CTest.
#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string qcr_bin() {
    if (const char* bin = std::getenv("QCR_BIN")) return bin;
    return QCR_BIN_DEFAULT;
}

struct TempDir {
    fs::path path;
    TempDir() {
        static int counter = 0;
        path = fs::temp_directory_path() /
               ("qcr_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    fs::path file(const std::string& name) const { return path / name; }
};

int run_cmd(const std::string& args, const fs::path& stdout_to = {},
            const fs::path& stderr_to = {}) {
    std::string cmd = qcr_bin() + " " + args;
    cmd += stdout_to.empty() ? " >/dev/null" : (" >" + stdout_to.string());
    cmd += stderr_to.empty() ? " 2>/dev/null" : (" 2>" + stderr_to.string());
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kBell = "qubits 2\ncreg m 1\nregion prep\nh 0\ncx 0 1\nmeasure 0 -> m[0]\n";

}  // namespace

TEST_CASE("run: bell fixture, 100 shots, exit 0, 100 transcript events") {
    TempDir dir;
    std::ofstream(dir.file("bell.qdc")) << kBell;
    int rc = run_cmd("run --program " + dir.file("bell.qdc").string() + " --shots 100 --seed 0" +
                         " --ckpt-dir " + dir.file("ck").string() + " --policy shots:10",
                     dir.file("report.json"));
    CHECK(rc == 0);
    json report = json::parse(slurp(dir.file("report.json")));
    CHECK(report.at("result").at("transcript_events").get<long>() == 100);
    CHECK(report.at("counts").at("shots_executed").get<long>() == 100);
    CHECK(report.at("checkpoints").size() == 10);
}

TEST_CASE("run: injected failure exits 3 with checkpoints persisted") {
    TempDir dir;
    std::ofstream(dir.file("bell.qdc")) << kBell;
    int rc = run_cmd("run --program " + dir.file("bell.qdc").string() + " --shots 100 --seed 0" +
                         " --ckpt-dir " + dir.file("ck").string() +
                         " --policy shots:10 --fail-at shot:37",
                     dir.file("report.json"));
    CHECK(rc == 3);
    CHECK(!fs::is_empty(dir.file("ck")));
    json report = json::parse(slurp(dir.file("report.json")));
    CHECK(report.at("injected_failure_hit").get<bool>());
}

TEST_CASE("run: malformed program exits 1 with diagnostics on stderr") {
    TempDir dir;
    std::ofstream(dir.file("bad.qdc")) << "qubits 1\nx 3\n";
    int rc = run_cmd("run --program " + dir.file("bad.qdc").string() + " --ckpt-dir " +
                         dir.file("ck").string(),
                     {}, dir.file("stderr.txt"));
    CHECK(rc == 1);
    CHECK(slurp(dir.file("stderr.txt")).find("qubit 3 out of range") != std::string::npos);
}

TEST_CASE("resume: after a kill, combined output equals the uninterrupted run") {
    TempDir dir;
    std::ofstream(dir.file("bell.qdc")) << kBell;
    const std::string common = "--program " + dir.file("bell.qdc").string() +
                               " --shots 40 --seed 7 --policy shots:5";

    REQUIRE(run_cmd("run " + common + " --ckpt-dir " + dir.file("full").string(),
                    dir.file("full.json")) == 0);
    REQUIRE(run_cmd("run " + common + " --ckpt-dir " + dir.file("ck").string() +
                        " --fail-at shot:23",
                    dir.file("killed.json")) == 3);
    REQUIRE(run_cmd("resume --program " + dir.file("bell.qdc").string() + " --ckpt-dir " +
                        dir.file("ck").string() + " --policy shots:5",
                    dir.file("resumed.json")) == 0);

    json full = json::parse(slurp(dir.file("full.json")));
    json resumed = json::parse(slurp(dir.file("resumed.json")));
    CHECK(full.at("result") == resumed.at("result"));
    CHECK(resumed.at("resumed").get<bool>());
    CHECK(resumed.at("counts").at("shots_replayed").get<long>() <= 1);
}

TEST_CASE("resume: edited program exits 4") {
    TempDir dir;
    std::ofstream(dir.file("bell.qdc")) << kBell;
    REQUIRE(run_cmd("run --program " + dir.file("bell.qdc").string() +
                        " --shots 10 --seed 0 --policy shots:2 --ckpt-dir " +
                        dir.file("ck").string() + " --fail-at shot:6") == 3);
    std::ofstream(dir.file("edited.qdc")) << kBell << "# edited\n";
    int rc = run_cmd("resume --program " + dir.file("edited.qdc").string() + " --ckpt-dir " +
                     dir.file("ck").string());
    CHECK(rc == 4);
}

TEST_CASE("resume: empty store exits 5") {
    TempDir dir;
    fs::create_directories(dir.file("ck"));
    std::ofstream(dir.file("bell.qdc")) << kBell;
    int rc = run_cmd("resume --program " + dir.file("bell.qdc").string() + " --ckpt-dir " +
                     dir.file("ck").string());
    CHECK(rc == 5);
}

TEST_CASE("verify: fresh store passes, tampering and edits fail with exit 6") {
    TempDir dir;
    std::ofstream(dir.file("bell.qdc")) << kBell;
    REQUIRE(run_cmd("run --program " + dir.file("bell.qdc").string() +
                        " --shots 10 --seed 0 --policy region --ckpt-dir " +
                        dir.file("ck").string() + " --fail-at shot:6") == 3);

    CHECK(run_cmd("verify --program " + dir.file("bell.qdc").string() + " --ckpt-dir " +
                  dir.file("ck").string()) == 0);

    SECTION("edited program") {
        std::ofstream(dir.file("edited.qdc")) << kBell << "h 1\n";
        int rc = run_cmd("verify --program " + dir.file("edited.qdc").string() + " --ckpt-dir " +
                             dir.file("ck").string(),
                         {}, dir.file("err.txt"));
        CHECK(rc == 6);
    }

    SECTION("tampered record file") {
        // Flip one byte inside some record's payload.
        fs::path victim;
        for (const auto& entry : fs::directory_iterator(dir.file("ck")))
            if (entry.path().string().ends_with(".ckpt.json")) victim = entry.path();
        REQUIRE(!victim.empty());
        std::fstream f(victim, std::ios::in | std::ios::out | std::ios::binary);
        f.seekg(0, std::ios::end);
        auto size = static_cast<long>(f.tellg());
        f.seekp(size / 2);
        char c;
        f.seekg(size / 2);
        f.get(c);
        f.seekp(size / 2);
        f.put(c == '0' ? '1' : '0');
        f.close();
        int rc = run_cmd("verify --program " + dir.file("bell.qdc").string() + " --ckpt-dir " +
                             dir.file("ck").string(),
                         {}, dir.file("err.txt"));
        CHECK(rc == 6);
    }
}

TEST_CASE("storage failure exits 2") {
    TempDir dir;
    std::ofstream(dir.file("bell.qdc")) << kBell;
    std::ofstream(dir.file("not_a_dir")) << "file in the way";
    int rc = run_cmd("run --program " + dir.file("bell.qdc").string() + " --ckpt-dir " +
                     (dir.file("not_a_dir") / "ck").string());
    CHECK(rc == 2);
}

TEST_CASE("identical invocations emit identical reports minus timing") {
    TempDir dir;
    std::ofstream(dir.file("bell.qdc")) << kBell;
    const std::string common = "--program " + dir.file("bell.qdc").string() +
                               " --shots 20 --seed 3 --policy region,shots:4";
    REQUIRE(run_cmd("run " + common + " --ckpt-dir " + dir.file("a").string(),
                    dir.file("a.json")) == 0);
    REQUIRE(run_cmd("run " + common + " --ckpt-dir " + dir.file("b").string(),
                    dir.file("b.json")) == 0);
    json a = json::parse(slurp(dir.file("a.json")));
    json b = json::parse(slurp(dir.file("b.json")));
    a.erase("timing");
    b.erase("timing");
    CHECK(a == b);
}

TEST_CASE("usage errors map onto the documented parse-error exit code") {
    CHECK(run_cmd("run --no-such-flag") == 1);
    CHECK(run_cmd("bogus-subcommand") == 1);
    CHECK(run_cmd("") == 1);  // missing subcommand
    CHECK(run_cmd("--help") == 0);
    TempDir dir;
    std::ofstream(dir.file("bell.qdc")) << kBell;
    // Bad policy / failure strings are config errors, also exit 1.
    CHECK(run_cmd("run --program " + dir.file("bell.qdc").string() + " --ckpt-dir " +
                  dir.file("ck").string() + " --policy shots:0") == 1);
    CHECK(run_cmd("run --program " + dir.file("bell.qdc").string() + " --ckpt-dir " +
                  dir.file("ck2").string() + " --fail-at shot:999") == 1);
}

TEST_CASE("resume from an explicit mid-chain checkpoint id") {
    TempDir dir;
    std::ofstream(dir.file("bell.qdc")) << kBell;
    const std::string common = "--program " + dir.file("bell.qdc").string() +
                               " --shots 12 --seed 4 --policy shots:3";
    REQUIRE(run_cmd("run " + common + " --ckpt-dir " + dir.file("full").string(),
                    dir.file("full.json")) == 0);
    REQUIRE(run_cmd("run " + common + " --ckpt-dir " + dir.file("ck").string()) == 0);

    // Pick the second checkpoint of the chain (completed=6) and resume
    // from there; later shots re-run to the same final result.
    json full = json::parse(slurp(dir.file("full.json")));
    std::string mid_id = full.at("checkpoints").at(1).get<std::string>();
    REQUIRE(run_cmd("resume --program " + dir.file("bell.qdc").string() + " --ckpt-dir " +
                        dir.file("ck").string() + " --policy shots:3 --checkpoint " + mid_id,
                    dir.file("mid.json")) == 0);
    json mid = json::parse(slurp(dir.file("mid.json")));
    CHECK(mid.at("result") == full.at("result"));
    CHECK(mid.at("resumed_from").get<std::string>() == mid_id);
}

TEST_CASE("on-failure restart and reschedule responses") {
    TempDir dir;
    std::ofstream(dir.file("bell.qdc")) << kBell;
    const std::string common = "--program " + dir.file("bell.qdc").string() +
                               " --shots 10 --seed 6 --policy shots:2";
    REQUIRE(run_cmd("run " + common + " --ckpt-dir " + dir.file("full").string(),
                    dir.file("full.json")) == 0);

    SECTION("restart re-runs from scratch with the same seed") {
        REQUIRE(run_cmd("run " + common + " --ckpt-dir " + dir.file("ck").string() +
                            " --fail-at shot:5") == 3);
        REQUIRE(run_cmd("resume --program " + dir.file("bell.qdc").string() + " --ckpt-dir " +
                            dir.file("ck").string() +
                            " --policy shots:2 --on-failure restart",
                        dir.file("restarted.json")) == 0);
        json full = json::parse(slurp(dir.file("full.json")));
        json restarted = json::parse(slurp(dir.file("restarted.json")));
        CHECK(restarted.at("result") == full.at("result"));
        CHECK(restarted.at("counts").at("shots_executed").get<long>() == 10);  // everything re-ran
        CHECK(!restarted.at("resumed").get<bool>());
    }

    SECTION("reschedule tags the continued chain's metadata") {
        REQUIRE(run_cmd("run " + common + " --ckpt-dir " + dir.file("ck").string() +
                            " --fail-at shot:5") == 3);
        REQUIRE(run_cmd("resume --program " + dir.file("bell.qdc").string() + " --ckpt-dir " +
                            dir.file("ck").string() +
                            " --policy shots:2 --on-failure reschedule",
                        dir.file("resched.json")) == 0);
        json resched = json::parse(slurp(dir.file("resched.json")));
        json full = json::parse(slurp(dir.file("full.json")));
        CHECK(resched.at("result") == full.at("result"));
        // The newest record carries the backend tag.
        std::string last_id = resched.at("checkpoints").back().get<std::string>();
        json record = json::parse(slurp(dir.file("ck") / (last_id + ".ckpt.json")));
        CHECK(record.at("calibration_metadata").at("backend").get<std::string>() ==
              "rescheduled");
    }
}

TEST_CASE("info summarizes the store") {
    TempDir dir;
    std::ofstream(dir.file("bell.qdc")) << kBell;
    REQUIRE(run_cmd("run --program " + dir.file("bell.qdc").string() +
                        " --shots 4 --seed 0 --policy shots:1 --ckpt-dir " +
                        dir.file("ck").string()) == 0);
    int rc = run_cmd("info --ckpt-dir " + dir.file("ck").string(), dir.file("info.txt"));
    CHECK(rc == 0);
    auto text = slurp(dir.file("info.txt"));
    CHECK(text.find("records: 4") != std::string::npos);
    CHECK(text.find("lineage:") != std::string::npos);
}

TEST_CASE("QCR_CKPT_DIR provides the default store directory") {
    TempDir dir;
    std::ofstream(dir.file("bell.qdc")) << kBell;
    std::string cmd = "QCR_CKPT_DIR=" + dir.file("envck").string() + " " + qcr_bin() +
                      " run --program " + dir.file("bell.qdc").string() +
                      " --shots 3 --seed 0 --policy shots:1 >/dev/null 2>/dev/null";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(fs::exists(dir.file("envck") / "LATEST"));
}

TEST_CASE("driver subcommands run and resume end to end") {
    TempDir dir;
    // repcode with injected error: kill at a round boundary, resume, verify.
    REQUIRE(run_cmd("repcode --rounds 4 --inject 2:1 --policy region --ckpt-dir " +
                        dir.file("rc").string() + " --fail-at op:round3:26",
                    dir.file("killed.json")) == 3);
    REQUIRE(run_cmd("resume --ckpt-dir " + dir.file("rc").string() + " --policy region",
                    dir.file("resumed.json")) == 0);
    REQUIRE(run_cmd("verify --ckpt-dir " + dir.file("rc").string()) == 0);

    json resumed = json::parse(slurp(dir.file("resumed.json")));
    CHECK(resumed.at("result").at("pauli_frame").get<std::string>() == "IXI");
    CHECK(resumed.at("result").at("logical_outcome").get<long>() == 0);

    // vqe + verify
    REQUIRE(run_cmd("vqe --iters 5 --policy iter --ckpt-dir " + dir.file("vq").string(),
                    dir.file("vqe.json")) == 0);
    REQUIRE(run_cmd("verify --ckpt-dir " + dir.file("vq").string()) == 0);
}
