#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "qj/math.hpp"

namespace qj::ballistics {

// Lift-off state of the COM in the world frame.
struct BallisticState {
    Vec3 c_lo;     // m
    Vec3 cdot_lo;  // m/s
};

struct LandingPrediction {
    Vec3 c_td;            // predicted touchdown COM position, m
    double flight_time;   // s
    double apex_z;        // m
    double time_to_apex;  // s
};

struct ApexInfo {
    double apex_z;
    double time_to_apex;
};

struct UnreachableError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flight duration until the COM crosses z_tg. Returns the largest positive
// root (arrival while descending); a target above lift-off that is touched
// only at the apex yields that single crossing. Throws UnreachableError
// when no non-negative root exists (target above apex).
double flight_time(double z_lo, double vz, double z_tg, double g = kGravity);

// Closed-form projectile landing at the plane z = z_tg.
LandingPrediction predict_landing(const BallisticState& state, double z_tg, double g = kGravity);

// Vertical lift-off velocity as a function of the horizontal one, in the 2D
// side view of the jump plane. Requires vx != 0 and a nonzero horizontal gap.
double vz_of_vx(const Vec3& c_lo, const Vec3& c_tg, double vx, double g = kGravity);

// Apex elevation and time to apex; a descending lift-off gives the lift-off
// point itself (time 0).
ApexInfo apex(const BallisticState& state, double g = kGravity);

// A-priori feasibility check of a lift-off state against a target. Rejection
// is a value, not an error.
struct FilterResult {
    bool accepted = false;
    std::string reason;  // "apex-below-target" | "unreachable" when rejected
    std::optional<LandingPrediction> prediction;
};

FilterResult safety_filter(const BallisticState& state, const Vec3& c_tg, double g = kGravity);

}  // namespace qj::ballistics
