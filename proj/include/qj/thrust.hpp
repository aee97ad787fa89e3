#pragma once

#include <array>
#include <string>

#include "qj/ballistics.hpp"
#include "qj/bezier.hpp"
#include "qj/math.hpp"

namespace qj::thrust {

// Displacement command: where to land relative to the start pose.
struct JumpCommand {
    Vec3 delta_c;    // m
    Vec3 delta_phi;  // rad, ZYX Euler (roll, pitch, yaw)
};

// The 13 policy outputs. Angles follow the (roll, pitch, yaw) storage order.
struct JumpAction {
    double t_th_b;   // Bezier thrust duration, s
    double r_p;      // extension radius, m
    double theta_p;  // position pitch angle, rad
    double r_v;      // lift-off speed, m/s
    double theta_v;  // velocity pitch angle, rad
    double k;        // explosive velocity multiplier
    double d;        // explosive displacement, m
    Vec3 phi_lo;     // lift-off orientation, rad
    Vec3 phidot_lo;  // lift-off Euler rates, rad/s

    static constexpr int kDim = 13;
    Vec13 as_vector() const;
    static JumpAction from_vector(const Vec13& v);
};

// Legal [lo, hi] per action component, in JumpAction vector order.
const std::array<std::pair<double, double>, JumpAction::kDim>& action_ranges();

struct ClipResult {
    JumpAction action;
    Vec13 excess;  // per-component distance clipped away (>= 0), physical units
};

// Clamp a raw action into the legal ranges; the excess feeds the action-limit
// penalty. Idempotent.
ClipResult clip_action(const Vec13& raw);

// Yaw of the vertical plane through start and target; zero gap gives 0
// (in-place jump convention).
double jump_plane_yaw(const Vec3& c0, const Vec3& c_tg);

// Lift-off boundary conditions after decoding an action.
struct LiftoffBoundary {
    Vec3 c_lo_b, cdot_lo_b;  // end of the Bezier segment
    Vec3 c_lo_e, cdot_lo_e;  // end of the UARM segment (actual lift-off)
    Vec3 phi_lo, phidot_lo;
    double t_th_b = 0;  // Bezier duration, s
    double t_th_e = 0;  // UARM duration, s (0 iff d == 0)
    double t_th = 0;    // total thrust time
    double accel = 0;   // UARM acceleration magnitude, m/s^2
};

// Spherical decode of the action into boundary conditions. The spherical
// origin is the ground projection of the initial COM, z measured from the
// ground. Throws std::domain_error when d > 0 with zero lift-off speed.
LiftoffBoundary decode(const JumpAction& action, const Vec3& c0, const Vec3& phi0,
                       const Vec3& c_tg);

// Cubic position curve linking (c0, cdot0) to the Bezier lift-off state.
bezier::ControlPolygon solve_position_bezier(const Vec3& c0, const Vec3& cdot0,
                                             const LiftoffBoundary& boundary);

// Cubic orientation curve over the full thrust duration.
bezier::ControlPolygon solve_orientation_bezier(const Vec3& phi0, const Vec3& phidot0,
                                                const Vec3& phi_lo, const Vec3& phidot_lo,
                                                double t_th);

// Piecewise thrust reference: position Bezier, then UARM along the frozen
// lift-off direction; orientation Bezier spans the whole thrust.
struct ThrustTrajectory {
    bezier::ControlPolygon position;
    bezier::ControlPolygon orientation;
    LiftoffBoundary boundary;
    Vec3 uarm_dir;             // unit direction of the UARM segment
    bool literal_lerp = false; // sample UARM position by plain lerp instead of
                               // constant-acceleration kinematics
    double t_th() const { return boundary.t_th; }
};

ThrustTrajectory build_trajectory(const Vec3& c0, const Vec3& cdot0, const Vec3& phi0,
                                  const Vec3& phidot0, const LiftoffBoundary& boundary,
                                  bool literal_lerp = false);

struct ReferenceSample {
    Vec3 c, cdot, phi, phidot;
};

// Reference pose/twist at t in [0, T_th].
ReferenceSample sample(const ThrustTrajectory& traj, double t);

// Policy state: (delta position, delta orientation) with the yaw difference
// wrapped into (-pi, pi].
Vec6 encode_state(const Vec3& c0, const Vec3& phi0, const Vec3& c_tg, const Vec3& phi_tg);

// Minimum sampled COM height over the thrust; checked against the configured
// floor clearance by callers (violations are reported, never fixed up).
double min_sampled_height(const ThrustTrajectory& traj, int samples = 400);

// CSV export: t,cx,cy,cz,vx,vy,vz,roll,pitch,yaw,wr,wp,wy.
void export_csv(const ThrustTrajectory& traj, const std::string& path, double period);

}  // namespace qj::thrust
