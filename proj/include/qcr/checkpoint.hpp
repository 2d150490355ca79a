#pragma once

#include <charconv>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qcr/errors.hpp"
#include "qcr/program.hpp"
#include "qcr/sha256.hpp"
#include "qcr/transcript.hpp"

namespace qcr {

struct Position {
    int region_index = 0;
    int op_index = 0;
    friend bool operator==(const Position&, const Position&) = default;
};

struct ShotCursor {
    long completed_shots = 0;
    long shots_total = 0;
    std::optional<long> in_flight_shot;
    friend bool operator==(const ShotCursor&, const ShotCursor&) = default;
};

/// Error-tracking state carried by logical checkpoints: the accumulated
/// Pauli frame plus the syndrome history that produced it.
struct DecoderState {
    std::string pauli_frame;  // over {I,X,Y,Z}
    std::vector<std::vector<std::uint8_t>> syndrome_history;
    friend bool operator==(const DecoderState&, const DecoderState&) = default;
};

/// Classical record of one checkpoint. Holds measurement outcomes,
/// parameters, counters, seeds and metadata; never amplitudes. The id is
/// the SHA-256 of the canonical serialization with `checkpoint_id` and
/// `created_at` excluded, so ids are reproducible across reruns.
struct CheckpointRecord {
    int version = 1;
    std::string checkpoint_id;
    std::optional<std::string> parent_id;
    CheckpointClass ckpt_class = CheckpointClass::Classicalized;
    std::string program_digest;
    Position position;
    ShotCursor shot_cursor;
    std::uint64_t master_seed = 0;
    std::map<std::string, std::vector<std::uint8_t>> registers;
    Transcript transcript;
    long iteration = 0;
    std::vector<double> parameters;
    std::vector<ControlFlowEvent> control_flow;
    std::map<std::string, std::string> calibration_metadata;
    std::optional<DecoderState> decoder_state;
    std::string created_at;  // ISO-8601 UTC

    friend bool operator==(const CheckpointRecord&, const CheckpointRecord&) = default;
};

namespace detail {

/// Shortest round-trip decimal form (<= 17 significant digits).
/// Zeros are normalized: -0.0 and 0.0 share the canonical form "0".
inline void json_double(std::string& out, double v) {
    if (!std::isfinite(v)) throw SchemaError("non-finite real cannot be serialized");
    if (v == 0.0) {
        out.push_back('0');
        return;
    }
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.append(buf, res.ptr);
}

inline void json_string(std::string& out, std::string_view s) {
    out.push_back('"');
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out.push_back(c);
                }
        }
    }
    out.push_back('"');
}

}  // namespace detail

/// Canonical byte form: UTF-8 JSON, keys in lexicographic order, no
/// insignificant whitespace, reals in shortest round-trip form, the
/// 64-bit seed as a decimal string. `include_volatile` drops the
/// digest-excluded fields (checkpoint_id, created_at) when false.
inline std::string canonical_serialize(const CheckpointRecord& r, bool include_volatile = true) {
    std::string o;
    o.reserve(512 + 64 * r.transcript.size());
    using detail::json_double;
    using detail::json_string;

    o += "{\"calibration_metadata\":{";
    bool first = true;
    for (const auto& [k, v] : r.calibration_metadata) {
        if (!first) o.push_back(',');
        first = false;
        json_string(o, k);
        o.push_back(':');
        json_string(o, v);
    }
    o += "}";
    if (include_volatile) {
        o += ",\"checkpoint_id\":";
        json_string(o, r.checkpoint_id);
    }
    o += ",\"class\":";
    json_string(o, to_string(r.ckpt_class));
    o += ",\"control_flow\":[";
    first = true;
    for (const auto& cf : r.control_flow) {
        if (!first) o.push_back(',');
        first = false;
        o += "{\"op_index\":" + std::to_string(cf.op_index) +
             ",\"taken\":" + (cf.taken ? "true" : "false") + "}";
    }
    o += "]";
    if (include_volatile) {
        o += ",\"created_at\":";
        json_string(o, r.created_at);
    }
    o += ",\"decoder_state\":";
    if (r.decoder_state) {
        o += "{\"pauli_frame\":";
        json_string(o, r.decoder_state->pauli_frame);
        o += ",\"syndrome_history\":[";
        first = true;
        for (const auto& row : r.decoder_state->syndrome_history) {
            if (!first) o.push_back(',');
            first = false;
            o.push_back('[');
            for (std::size_t i = 0; i < row.size(); ++i) {
                if (i) o.push_back(',');
                o += row[i] ? "1" : "0";
            }
            o.push_back(']');
        }
        o += "]}";
    } else {
        o += "null";
    }
    o += ",\"iteration\":" + std::to_string(r.iteration);
    o += ",\"master_seed\":\"" + std::to_string(r.master_seed) + "\"";
    o += ",\"parameters\":[";
    for (std::size_t i = 0; i < r.parameters.size(); ++i) {
        if (i) o.push_back(',');
        json_double(o, r.parameters[i]);
    }
    o += "],\"parent_id\":";
    if (r.parent_id)
        json_string(o, *r.parent_id);
    else
        o += "null";
    o += ",\"position\":{\"op_index\":" + std::to_string(r.position.op_index) +
         ",\"region_index\":" + std::to_string(r.position.region_index) + "}";
    o += ",\"program_digest\":";
    json_string(o, r.program_digest);
    o += ",\"registers\":{";
    first = true;
    for (const auto& [name, bits] : r.registers) {
        if (!first) o.push_back(',');
        first = false;
        json_string(o, name);
        o += ":[";
        for (std::size_t i = 0; i < bits.size(); ++i) {
            if (i) o.push_back(',');
            o += bits[i] ? "1" : "0";
        }
        o.push_back(']');
    }
    o += "}";
    o += ",\"shot_cursor\":{\"completed_shots\":" + std::to_string(r.shot_cursor.completed_shots) +
         ",\"in_flight_shot\":" +
         (r.shot_cursor.in_flight_shot ? std::to_string(*r.shot_cursor.in_flight_shot)
                                       : std::string("null")) +
         ",\"shots_total\":" + std::to_string(r.shot_cursor.shots_total) + "}";
    o += ",\"transcript\":[";
    first = true;
    for (const auto& ev : r.transcript) {
        if (!first) o.push_back(',');
        first = false;
        o += "{\"forced\":";
        o += ev.forced ? "true" : "false";
        o += ",\"op_index\":" + std::to_string(ev.op_index);
        o += ",\"outcome\":" + std::to_string(ev.outcome);
        o += ",\"qubit\":" + std::to_string(ev.qubit);
        o += ",\"shot_index\":" + std::to_string(ev.shot_index) + "}";
    }
    o += "]";
    o += ",\"version\":" + std::to_string(r.version);
    o += "}";
    return o;
}

/// SHA-256 of the canonical serialization with the volatile fields excluded.
inline std::string compute_checkpoint_id(const CheckpointRecord& r) {
    return sha256_hex(canonical_serialize(r, /*include_volatile=*/false));
}

inline std::string iso8601_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline bool is_hex_digest(std::string_view s) {
    if (s.size() != 64) return false;
    for (char c : s)
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
    return true;
}

/// Structural invariants that hold for every well-formed record.
inline void validate_record(const CheckpointRecord& r) {
    if (r.version != 1) throw VersionUnsupported("unsupported record version " + std::to_string(r.version));
    if (!is_hex_digest(r.program_digest)) throw SchemaError("program_digest is not a 64-hex digest");
    if (r.parent_id && !is_hex_digest(*r.parent_id)) throw SchemaError("parent_id is not a 64-hex digest");
    if ((r.ckpt_class == CheckpointClass::Logical) != r.decoder_state.has_value())
        throw SchemaError("decoder_state must be present iff class is logical");
    if (r.shot_cursor.completed_shots < 0 || r.shot_cursor.completed_shots > r.shot_cursor.shots_total)
        throw SchemaError("shot cursor out of range");
    // Shots rejoin in index order before any checkpoint is cut, so an
    // in-flight shot is always the next one after the completed prefix.
    if (r.shot_cursor.in_flight_shot && *r.shot_cursor.in_flight_shot != r.shot_cursor.completed_shots)
        throw SchemaError("in-flight shot is not the completed-prefix successor");
    if (r.iteration < 0) throw SchemaError("negative iteration");
    for (const auto& [name, bits] : r.registers) {
        (void)name;
        for (auto b : bits)
            if (b > 1) throw SchemaError("register bit out of range");
    }
    if (r.decoder_state) {
        for (char c : r.decoder_state->pauli_frame)
            if (c != 'I' && c != 'X' && c != 'Y' && c != 'Z')
                throw SchemaError("pauli_frame contains invalid character");
    }
}

/// Stamps created_at (if empty) and the content-addressed id.
inline CheckpointRecord finalize_record(CheckpointRecord r) {
    if (r.created_at.empty()) r.created_at = iso8601_now();
    r.checkpoint_id = compute_checkpoint_id(r);
    validate_record(r);
    return r;
}

/// Parses canonical bytes back into a record and re-verifies the digest.
inline CheckpointRecord deserialize_record(std::string_view bytes) {
    nlohmann::json j = nlohmann::json::parse(bytes, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw SchemaError("record is not valid JSON");
    if (!j.is_object()) throw SchemaError("record is not a JSON object");

    CheckpointRecord r;
    try {
        r.version = j.at("version").get<int>();
        if (r.version != 1)
            throw VersionUnsupported("unsupported record version " + std::to_string(r.version));
        r.checkpoint_id = j.at("checkpoint_id").get<std::string>();
        if (j.at("parent_id").is_null())
            r.parent_id = std::nullopt;
        else
            r.parent_id = j.at("parent_id").get<std::string>();
        auto cls = checkpoint_class_from_string(j.at("class").get<std::string>());
        if (!cls) throw SchemaError("unknown checkpoint class");
        r.ckpt_class = *cls;
        r.program_digest = j.at("program_digest").get<std::string>();
        r.position.region_index = j.at("position").at("region_index").get<int>();
        r.position.op_index = j.at("position").at("op_index").get<int>();
        const auto& sc = j.at("shot_cursor");
        r.shot_cursor.completed_shots = sc.at("completed_shots").get<long>();
        r.shot_cursor.shots_total = sc.at("shots_total").get<long>();
        if (!sc.at("in_flight_shot").is_null())
            r.shot_cursor.in_flight_shot = sc.at("in_flight_shot").get<long>();
        {
            const auto& seed = j.at("master_seed");
            if (!seed.is_string()) throw SchemaError("master_seed must be a decimal string");
            const std::string& s = seed.get_ref<const std::string&>();
            std::uint64_t v = 0;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc{} || p != s.data() + s.size())
                throw SchemaError("master_seed is not a decimal 64-bit value");
            r.master_seed = v;
        }
        for (const auto& [name, bits] : j.at("registers").items()) {
            std::vector<std::uint8_t> row;
            for (const auto& b : bits) row.push_back(b.get<std::uint8_t>());
            r.registers[name] = std::move(row);
        }
        for (const auto& ev : j.at("transcript")) {
            r.transcript.push_back({ev.at("shot_index").get<long>(), ev.at("op_index").get<int>(),
                                    ev.at("qubit").get<int>(), ev.at("outcome").get<int>(),
                                    ev.at("forced").get<bool>()});
        }
        r.iteration = j.at("iteration").get<long>();
        for (const auto& p : j.at("parameters")) r.parameters.push_back(p.get<double>());
        for (const auto& cf : j.at("control_flow"))
            r.control_flow.push_back({cf.at("op_index").get<int>(), cf.at("taken").get<bool>()});
        for (const auto& [k, v] : j.at("calibration_metadata").items())
            r.calibration_metadata[k] = v.get<std::string>();
        if (!j.at("decoder_state").is_null()) {
            DecoderState ds;
            ds.pauli_frame = j.at("decoder_state").at("pauli_frame").get<std::string>();
            for (const auto& row : j.at("decoder_state").at("syndrome_history")) {
                std::vector<std::uint8_t> bits;
                for (const auto& b : row) bits.push_back(b.get<std::uint8_t>());
                ds.syndrome_history.push_back(std::move(bits));
            }
            r.decoder_state = std::move(ds);
        }
        r.created_at = j.at("created_at").get<std::string>();
    } catch (const VersionUnsupported&) {
        throw;
    } catch (const SchemaError&) {
        throw;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("malformed record: ") + e.what());
    }

    validate_record(r);
    std::string expect = compute_checkpoint_id(r);
    if (!is_hex_digest(r.checkpoint_id) || expect != r.checkpoint_id)
        throw DigestMismatch("record digest " + r.checkpoint_id + " does not match recomputed " + expect);
    return r;
}

}  // namespace qcr
