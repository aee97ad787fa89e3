#include "qj/ballistics.hpp"

#include <algorithm>
#include <cmath>

namespace qj::ballistics {

double flight_time(double z_lo, double vz, double z_tg, double g) {
    // z_lo + vz*T - g/2*T^2 = z_tg  =>  T = (vz +- sqrt(vz^2 - 2g(z_tg-z_lo))) / g
    const double disc = vz * vz - 2.0 * g * (z_tg - z_lo);
    if (disc < 0.0)
        throw UnreachableError("flight_time: target above apex");
    const double root = std::sqrt(disc);
    const double t_desc = (vz + root) / g;
    if (t_desc >= 0.0) return t_desc;
    throw UnreachableError("flight_time: no non-negative crossing");
}

LandingPrediction predict_landing(const BallisticState& state, double z_tg, double g) {
    const double t = flight_time(state.c_lo.z(), state.cdot_lo.z(), z_tg, g);
    const ApexInfo ap = apex(state, g);
    LandingPrediction out;
    out.c_td.x() = state.c_lo.x() + state.cdot_lo.x() * t;
    out.c_td.y() = state.c_lo.y() + state.cdot_lo.y() * t;
    out.c_td.z() = z_tg;
    out.flight_time = t;
    out.apex_z = ap.apex_z;
    out.time_to_apex = ap.time_to_apex;
    return out;
}

double vz_of_vx(const Vec3& c_lo, const Vec3& c_tg, double vx, double g) {
    // Slope term plus gravity term; the slope sign follows from substituting
    // T = dx/vx into the vertical flight equation.
    const double dx = c_tg.x() - c_lo.x();
    if (vx == 0.0) throw std::domain_error("vz_of_vx: vx must be nonzero");
    if (dx == 0.0) throw std::domain_error("vz_of_vx: zero horizontal gap");
    return (c_tg.z() - c_lo.z()) / dx * vx + 0.5 * dx * g / vx;
}

ApexInfo apex(const BallisticState& state, double g) {
    const double vz = std::max(state.cdot_lo.z(), 0.0);
    return {state.c_lo.z() + 0.5 * vz * vz / g, vz / g};
}

FilterResult safety_filter(const BallisticState& state, const Vec3& c_tg, double g) {
    FilterResult res;
    const ApexInfo ap = apex(state, g);
    if (c_tg.z() > ap.apex_z) {
        res.reason = "apex-below-target";
        return res;
    }
    try {
        res.prediction = predict_landing(state, c_tg.z(), g);
    } catch (const UnreachableError&) {
        res.reason = "unreachable";
        return res;
    }
    res.accepted = true;
    return res;
}

}  // namespace qj::ballistics
