#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <string>

#include "qcr/checkpoint.hpp"

#include "oracles.hpp"

using namespace qcr;

namespace {

CheckpointRecord sample_record() {
    CheckpointRecord r;
    r.ckpt_class = CheckpointClass::Classicalized;
    r.program_digest = std::string(64, 'a');
    r.position = {1, 6};
    r.shot_cursor = {3, 10, 3};
    r.master_seed = 0xdeadbeefcafef00dull;
    r.registers["m"] = {1, 0, 1};
    r.transcript = {{0, 3, 0, 1, false}, {1, 3, 0, 0, false}, {3, 3, 0, 1, false}};
    r.iteration = 2;
    r.parameters = {0.25, -1.5, 3.0e-7};
    r.control_flow = {{6, true}, {7, false}};
    r.calibration_metadata["backend"] = "sim-0";
    r.created_at = "2026-01-02T03:04:05Z";
    return r;
}

}  // namespace

TEST_CASE("canonical serialization is deterministic") {
    auto a = finalize_record(sample_record());
    auto b = finalize_record(sample_record());
    CHECK(canonical_serialize(a) == canonical_serialize(b));
    CHECK(a.checkpoint_id == b.checkpoint_id);
}

TEST_CASE("created_at is excluded from the digest but not the bytes") {
    auto a = sample_record();
    auto b = sample_record();
    b.created_at = "2030-12-31T23:59:59Z";
    auto fa = finalize_record(a);
    auto fb = finalize_record(b);
    CHECK(fa.checkpoint_id == fb.checkpoint_id);
    CHECK(canonical_serialize(fa) != canonical_serialize(fb));
}

TEST_CASE("checkpoint id matches an independent SHA-256 of the digest bytes") {
    auto r = finalize_record(sample_record());
    std::string digest_input = canonical_serialize(r, /*include_volatile=*/false);
    CHECK(r.checkpoint_id == oracle::sha256_hex(digest_input));
}

TEST_CASE("serialize/deserialize round trip") {
    auto r = finalize_record(sample_record());
    auto bytes = canonical_serialize(r);
    auto back = deserialize_record(bytes);
    CHECK(back == r);
    CHECK(canonical_serialize(back) == bytes);
}

TEST_CASE("round trip preserves awkward doubles exactly") {
    auto r = sample_record();
    r.parameters = {0.1, 1.0 / 3.0, 1e-300, 1.7976931348623157e308, 5e-324, 3.141592653589793,
                    -42.0};
    auto f = finalize_record(r);
    auto bytes = canonical_serialize(f);
    auto back = deserialize_record(bytes);
    REQUIRE(back.parameters.size() == r.parameters.size());
    for (std::size_t i = 0; i < r.parameters.size(); ++i) {
        REQUIRE(std::memcmp(&back.parameters[i], &r.parameters[i], sizeof(double)) == 0);
    }
    CHECK(canonical_serialize(back) == bytes);
}

TEST_CASE("negative zero is canonicalized to zero") {
    auto a = sample_record();
    a.parameters = {-0.0};
    auto b = sample_record();
    b.parameters = {0.0};
    CHECK(finalize_record(a).checkpoint_id == finalize_record(b).checkpoint_id);
    auto back = deserialize_record(canonical_serialize(finalize_record(a)));
    CHECK(back.parameters[0] == 0.0);
    CHECK(!std::signbit(back.parameters[0]));
}

TEST_CASE("tampering with digest-covered bytes is detected") {
    auto r = finalize_record(sample_record());
    std::string bytes = canonical_serialize(r);

    SECTION("flip an outcome in the transcript section") {
        auto pos = bytes.find("\"outcome\":1");
        REQUIRE(pos != std::string::npos);
        bytes[pos + 10] = '0';
        CHECK_THROWS_AS(deserialize_record(bytes), DigestMismatch);
    }
    SECTION("flip a register bit") {
        auto pos = bytes.find("\"m\":[1");
        REQUIRE(pos != std::string::npos);
        bytes[pos + 5] = '0';
        CHECK_THROWS_AS(deserialize_record(bytes), DigestMismatch);
    }
    SECTION("edit the stored id itself") {
        auto pos = bytes.find(r.checkpoint_id);
        REQUIRE(pos != std::string::npos);
        bytes[pos] = bytes[pos] == '0' ? '1' : '0';
        CHECK_THROWS_AS(deserialize_record(bytes), DigestMismatch);
    }
}

TEST_CASE("unsupported version") {
    auto r = finalize_record(sample_record());
    std::string bytes = canonical_serialize(r);
    auto pos = bytes.rfind("\"version\":1");
    REQUIRE(pos != std::string::npos);
    bytes[pos + 10] = '2';
    CHECK_THROWS_AS(deserialize_record(bytes), VersionUnsupported);
}

TEST_CASE("schema errors") {
    CHECK_THROWS_AS(deserialize_record("not json at all"), SchemaError);
    CHECK_THROWS_AS(deserialize_record("[1,2,3]"), SchemaError);
    CHECK_THROWS_AS(deserialize_record("{\"version\":1}"), SchemaError);
}

TEST_CASE("logical class and decoder state imply each other") {
    auto r = sample_record();
    r.ckpt_class = CheckpointClass::Logical;
    CHECK_THROWS_AS(finalize_record(r), SchemaError);  // logical without decoder state

    r.decoder_state = DecoderState{"IXI", {{0, 1}, {1, 1}}};
    auto f = finalize_record(r);
    auto back = deserialize_record(canonical_serialize(f));
    REQUIRE(back.decoder_state.has_value());
    CHECK(back.decoder_state->pauli_frame == "IXI");
    CHECK(back.decoder_state->syndrome_history == r.decoder_state->syndrome_history);

    auto bad = sample_record();
    bad.decoder_state = DecoderState{"III", {}};
    CHECK_THROWS_AS(finalize_record(bad), SchemaError);  // decoder state without logical class
}

TEST_CASE("any single-bit content mutation changes the id") {
    auto base = sample_record();
    auto fbase = finalize_record(base);

    auto mutated = base;
    mutated.parameters[0] = 0.250000001;
    CHECK(finalize_record(mutated).checkpoint_id != fbase.checkpoint_id);

    mutated = base;
    mutated.transcript[2].outcome ^= 1;
    CHECK(finalize_record(mutated).checkpoint_id != fbase.checkpoint_id);

    mutated = base;
    mutated.master_seed ^= 1;
    CHECK(finalize_record(mutated).checkpoint_id != fbase.checkpoint_id);

    mutated = base;
    mutated.calibration_metadata["backend"] = "sim-1";
    CHECK(finalize_record(mutated).checkpoint_id != fbase.checkpoint_id);

    mutated = base;
    mutated.iteration = 3;
    CHECK(finalize_record(mutated).checkpoint_id != fbase.checkpoint_id);
}

TEST_CASE("record size is independent of qubit count") {
    // Same transcript length, registers and parameters; only the digest of
    // the (different-width) program changes, and digests are fixed-width.
    auto small = sample_record();
    small.program_digest = qcr::sha256_hex("qubits 2 variant");
    auto big = sample_record();
    big.program_digest = qcr::sha256_hex("qubits 16 variant");
    auto sa = canonical_serialize(finalize_record(small));
    auto sb = canonical_serialize(finalize_record(big));
    double ratio = static_cast<double>(sa.size()) / static_cast<double>(sb.size());
    CHECK(ratio > 0.95);
    CHECK(ratio < 1.05);
}

TEST_CASE("record size grows linearly with transcript length") {
    auto make = [](long events) {
        auto r = sample_record();
        r.transcript.clear();
        for (long i = 0; i < events; ++i)
            r.transcript.push_back({i / 4, static_cast<int>(3 + i % 4), static_cast<int>(i % 2),
                                    static_cast<int>(i % 2), false});
        r.shot_cursor = {events / 4, events, std::nullopt};
        return canonical_serialize(finalize_record(r)).size();
    };
    const double base_overhead = static_cast<double>(make(0));
    double per10 = (static_cast<double>(make(10)) - base_overhead) / 10.0;
    double per1000 = (static_cast<double>(make(1000)) - base_overhead) / 1000.0;
    CHECK(per1000 / per10 > 0.9);
    CHECK(per1000 / per10 < 1.1);
}
