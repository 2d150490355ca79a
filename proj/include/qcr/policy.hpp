#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qcr/errors.hpp"
#include "qcr/program.hpp"

namespace qcr {

enum class FailureAction { Rollback, Restart, Reschedule };

inline std::string to_string(FailureAction a) {
    switch (a) {
        case FailureAction::Rollback: return "rollback";
        case FailureAction::Restart: return "restart";
        case FailureAction::Reschedule: return "reschedule";
    }
    return "rollback";
}

/// Checkpoint trigger policy plus the failure response. Parsed from the
/// flat spec string `iter|region|shots:K|conv:TOL|event` (comma-joined).
struct Policy {
    bool iteration_boundary = false;
    bool region_boundary = false;
    std::optional<long> every_k_shots;
    std::optional<double> convergence_tol;
    bool on_event = false;
    FailureAction on_failure = FailureAction::Rollback;
    CheckpointClass default_class = CheckpointClass::Classicalized;

    bool has_trigger() const {
        return iteration_boundary || region_boundary || every_k_shots.has_value() ||
               convergence_tol.has_value() || on_event;
    }

    void validate() const {
        if (!has_trigger()) throw ConfigError("policy needs at least one trigger");
        if (every_k_shots && *every_k_shots < 1)
            throw ConfigError("shots:K trigger requires K >= 1");
        if (convergence_tol && *convergence_tol <= 0)
            throw ConfigError("conv:TOL trigger requires TOL > 0");
    }

    static Policy parse(std::string_view spec) {
        Policy p;
        std::size_t pos = 0;
        while (pos <= spec.size()) {
            std::size_t comma = spec.find(',', pos);
            std::string_view item =
                comma == std::string_view::npos ? spec.substr(pos) : spec.substr(pos, comma - pos);
            if (item == "iter") {
                p.iteration_boundary = true;
            } else if (item == "region") {
                p.region_boundary = true;
            } else if (item == "event") {
                p.on_event = true;
            } else if (item.starts_with("shots:")) {
                auto k = detail::parse_int(item.substr(6));
                if (!k) throw ConfigError("bad trigger '" + std::string(item) + "'");
                p.every_k_shots = *k;
            } else if (item.starts_with("conv:")) {
                auto tol = detail::parse_real(item.substr(5));
                if (!tol) throw ConfigError("bad trigger '" + std::string(item) + "'");
                p.convergence_tol = *tol;
            } else if (!item.empty()) {
                throw ConfigError("unknown policy trigger '" + std::string(item) + "'");
            }
            if (comma == std::string_view::npos) break;
            pos = comma + 1;
        }
        p.validate();
        return p;
    }
};

/// Where the injected failure strikes. Parsed from
/// `op:REGION:OPINDEX|shot:K|iter:I`; `backend:LO:HI` is API-only.
struct FailureSpec {
    enum class Kind { KillAtOp, KillAtShot, KillAtIteration, BackendUnavailable };
    Kind kind = Kind::KillAtShot;
    std::string region;       // KillAtOp
    long op = 0;              // KillAtOp: absolute op index
    long shot = 0;            // KillAtShot; also the shot a KillAtOp applies to
    long iteration = 0;       // KillAtIteration
    long iter_lo = 0, iter_hi = 0;  // BackendUnavailable

    static FailureSpec parse(std::string_view spec) {
        FailureSpec f;
        auto split = [](std::string_view s) {
            std::vector<std::string_view> parts;
            std::size_t pos = 0;
            while (true) {
                std::size_t c = s.find(':', pos);
                parts.push_back(c == std::string_view::npos ? s.substr(pos) : s.substr(pos, c - pos));
                if (c == std::string_view::npos) break;
                pos = c + 1;
            }
            return parts;
        };
        auto parts = split(spec);
        if (parts.size() == 3 && parts[0] == "op") {
            auto op = detail::parse_int(parts[2]);
            if (!op || parts[1].empty()) throw ConfigError("bad failure spec '" + std::string(spec) + "'");
            f.kind = Kind::KillAtOp;
            f.region = std::string(parts[1]);
            f.op = *op;
            return f;
        }
        if (parts.size() == 2 && parts[0] == "shot") {
            auto k = detail::parse_int(parts[1]);
            if (!k || *k < 0) throw ConfigError("bad failure spec '" + std::string(spec) + "'");
            f.kind = Kind::KillAtShot;
            f.shot = *k;
            return f;
        }
        if (parts.size() == 2 && parts[0] == "iter") {
            auto i = detail::parse_int(parts[1]);
            if (!i || *i < 0) throw ConfigError("bad failure spec '" + std::string(spec) + "'");
            f.kind = Kind::KillAtIteration;
            f.iteration = *i;
            return f;
        }
        if (parts.size() == 3 && parts[0] == "backend") {
            auto lo = detail::parse_int(parts[1]);
            auto hi = detail::parse_int(parts[2]);
            if (!lo || !hi || *lo > *hi)
                throw ConfigError("bad failure spec '" + std::string(spec) + "'");
            f.kind = Kind::BackendUnavailable;
            f.iter_lo = *lo;
            f.iter_hi = *hi;
            return f;
        }
        throw ConfigError("bad failure spec '" + std::string(spec) + "'");
    }

    std::string describe() const {
        switch (kind) {
            case Kind::KillAtOp: return "op:" + region + ":" + std::to_string(op);
            case Kind::KillAtShot: return "shot:" + std::to_string(shot);
            case Kind::KillAtIteration: return "iter:" + std::to_string(iteration);
            case Kind::BackendUnavailable:
                return "backend:" + std::to_string(iter_lo) + ":" + std::to_string(iter_hi);
        }
        return {};
    }
};

struct FailureEvent {
    std::string kind;
    std::string position;
};

/// Pure mapping from failure event to response; store state decides the
/// Rollback -> Restart fallback elsewhere.
inline FailureAction on_failure(const FailureEvent& event, const Policy& policy) {
    (void)event;
    return policy.on_failure;
}

}  // namespace qcr
