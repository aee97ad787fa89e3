#include "qj/thrust.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qj/csv.hpp"

namespace qj::thrust {

Vec13 JumpAction::as_vector() const {
    Vec13 v;
    v << t_th_b, r_p, theta_p, r_v, theta_v, k, d, phi_lo.x(), phi_lo.y(), phi_lo.z(),
        phidot_lo.x(), phidot_lo.y(), phidot_lo.z();
    return v;
}

JumpAction JumpAction::from_vector(const Vec13& v) {
    JumpAction a;
    a.t_th_b = v[0];
    a.r_p = v[1];
    a.theta_p = v[2];
    a.r_v = v[3];
    a.theta_v = v[4];
    a.k = v[5];
    a.d = v[6];
    a.phi_lo = Vec3(v[7], v[8], v[9]);
    a.phidot_lo = Vec3(v[10], v[11], v[12]);
    return a;
}

const std::array<std::pair<double, double>, JumpAction::kDim>& action_ranges() {
    static const std::array<std::pair<double, double>, JumpAction::kDim> ranges = {{
        {0.4, 1.0},             // t_th_b, s
        {0.2, 0.4},             // r_p, m
        {kPi / 4, kPi / 2},     // theta_p, rad
        {0.5, 5.0},             // r_v, m/s
        {-kPi / 6, kPi / 2},    // theta_v, rad
        {1.0, 3.0},             // k
        {0.0, 0.3},             // d, m
        {-kPi / 6, kPi / 6},    // roll at lift-off
        {-kPi / 6, kPi / 6},    // pitch at lift-off
        {-kPi / 4, kPi / 4},    // yaw at lift-off
        {-1.0, 1.0},            // roll rate
        {-1.0, 1.0},            // pitch rate
        {-4.0, 4.0},            // yaw rate
    }};
    return ranges;
}

ClipResult clip_action(const Vec13& raw) {
    ClipResult out;
    Vec13 clipped;
    const auto& ranges = action_ranges();
    for (int i = 0; i < JumpAction::kDim; ++i) {
        const auto [lo, hi] = ranges[i];
        const double v = std::clamp(raw[i], lo, hi);
        clipped[i] = v;
        out.excess[i] = std::abs(raw[i] - v);
    }
    out.action = JumpAction::from_vector(clipped);
    return out;
}

double jump_plane_yaw(const Vec3& c0, const Vec3& c_tg) {
    const double dx = c_tg.x() - c0.x();
    const double dy = c_tg.y() - c0.y();
    if (dx == 0.0 && dy == 0.0) return 0.0;
    return std::atan2(dy, dx);
}

LiftoffBoundary decode(const JumpAction& a, const Vec3& c0, const Vec3& phi0, const Vec3& c_tg) {
    (void)phi0;
    LiftoffBoundary b;
    const double yaw = jump_plane_yaw(c0, c_tg);
    const Vec3 origin(c0.x(), c0.y(), 0.0);
    b.c_lo_b = origin + a.r_p * Vec3(std::cos(a.theta_p) * std::cos(yaw),
                                     std::cos(a.theta_p) * std::sin(yaw), std::sin(a.theta_p));
    b.cdot_lo_b = a.r_v * Vec3(std::cos(a.theta_v) * std::cos(yaw),
                               std::cos(a.theta_v) * std::sin(yaw), std::sin(a.theta_v));
    b.phi_lo = a.phi_lo;
    b.phidot_lo = a.phidot_lo;
    b.t_th_b = a.t_th_b;

    const double v0 = b.cdot_lo_b.norm();
    if (a.d > 0.0) {
        if (v0 == 0.0)
            throw std::domain_error("decode: d > 0 requires a nonzero lift-off velocity");
        const Vec3 dir = b.cdot_lo_b / v0;
        b.cdot_lo_e = a.k * b.cdot_lo_b;
        b.c_lo_e = b.c_lo_b + a.d * dir;
        const double vf = a.k * v0;
        if (a.k > 1.0) {
            b.accel = (vf * vf - v0 * v0) / (2.0 * a.d);
            b.t_th_e = (vf - v0) / b.accel;
        } else {
            // k == 1: constant-velocity segment
            b.accel = 0.0;
            b.t_th_e = a.d / v0;
        }
    } else {
        // d == 0 excludes the UARM phase entirely; lift-off is the Bezier one.
        b.c_lo_e = b.c_lo_b;
        b.cdot_lo_e = b.cdot_lo_b;
        b.accel = 0.0;
        b.t_th_e = 0.0;
    }
    b.t_th = b.t_th_b + b.t_th_e;
    return b;
}

bezier::ControlPolygon solve_position_bezier(const Vec3& c0, const Vec3& cdot0,
                                             const LiftoffBoundary& b) {
    if (!(b.t_th_b > 0.0)) throw std::domain_error("solve_position_bezier: T must be positive");
    Eigen::MatrixXd p(3, 4);
    p.col(0) = c0;
    p.col(1) = c0 + (b.t_th_b / 3.0) * cdot0;
    p.col(2) = b.c_lo_b - (b.t_th_b / 3.0) * b.cdot_lo_b;
    p.col(3) = b.c_lo_b;
    return bezier::ControlPolygon(std::move(p), b.t_th_b);
}

bezier::ControlPolygon solve_orientation_bezier(const Vec3& phi0, const Vec3& phidot0,
                                                const Vec3& phi_lo, const Vec3& phidot_lo,
                                                double t_th) {
    if (!(t_th > 0.0)) throw std::domain_error("solve_orientation_bezier: T must be positive");
    Eigen::MatrixXd q(3, 4);
    q.col(0) = phi0;
    q.col(1) = phi0 + (t_th / 3.0) * phidot0;
    q.col(2) = phi_lo - (t_th / 3.0) * phidot_lo;
    q.col(3) = phi_lo;
    return bezier::ControlPolygon(std::move(q), t_th);
}

ThrustTrajectory build_trajectory(const Vec3& c0, const Vec3& cdot0, const Vec3& phi0,
                                  const Vec3& phidot0, const LiftoffBoundary& boundary,
                                  bool literal_lerp) {
    Vec3 dir = Vec3::Zero();
    const double v0 = boundary.cdot_lo_b.norm();
    if (boundary.t_th_e > 0.0 && v0 > 0.0) dir = boundary.cdot_lo_b / v0;
    return ThrustTrajectory{
        solve_position_bezier(c0, cdot0, boundary),
        solve_orientation_bezier(phi0, phidot0, boundary.phi_lo, boundary.phidot_lo,
                                 boundary.t_th),
        boundary, dir, literal_lerp};
}

ReferenceSample sample(const ThrustTrajectory& traj, double t) {
    const auto& b = traj.boundary;
    if (t < 0.0 || t > b.t_th) throw std::domain_error("thrust::sample: t outside [0, T_th]");
    ReferenceSample s;
    if (t <= b.t_th_b) {
        Eigen::VectorXd c, v;
        traj.position.eval_cubic(t, c, v);
        s.c = c;
        s.cdot = v;
    } else {
        const double dt = t - b.t_th_b;
        const double v0 = b.cdot_lo_b.norm();
        if (traj.literal_lerp) {
            const double u = dt / b.t_th_e;
            s.c = (1.0 - u) * b.c_lo_b + u * b.c_lo_e;
            s.cdot = (1.0 - u) * b.cdot_lo_b + u * b.cdot_lo_e;
        } else {
            const double along = v0 * dt + 0.5 * b.accel * dt * dt;
            s.c = b.c_lo_b + along * traj.uarm_dir;
            s.cdot = (v0 + b.accel * dt) * traj.uarm_dir;
        }
    }
    Eigen::VectorXd phi, phidot;
    traj.orientation.eval_cubic(t, phi, phidot);
    s.phi = phi;
    s.phidot = phidot;
    return s;
}

Vec6 encode_state(const Vec3& c0, const Vec3& phi0, const Vec3& c_tg, const Vec3& phi_tg) {
    Vec6 s;
    s.head<3>() = c_tg - c0;
    Vec3 dphi = phi_tg - phi0;
    dphi.z() = wrap_angle(dphi.z());
    s.tail<3>() = dphi;
    return s;
}

double min_sampled_height(const ThrustTrajectory& traj, int samples) {
    double zmin = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= samples; ++i) {
        const double t = traj.t_th() * static_cast<double>(i) / samples;
        zmin = std::min(zmin, sample(traj, t).c.z());
    }
    return zmin;
}

void export_csv(const ThrustTrajectory& traj, const std::string& path, double period) {
    if (!(period > 0.0)) throw std::domain_error("export_csv: period must be positive");
    CsvWriter csv(path, {"t", "cx", "cy", "cz", "vx", "vy", "vz", "roll", "pitch", "yaw", "wr",
                         "wp", "wy"});
    const double t_end = traj.t_th();
    for (double t = 0.0;; t += period) {
        const double tc = std::min(t, t_end);
        const ReferenceSample s = sample(traj, tc);
        csv.row({tc, s.c.x(), s.c.y(), s.c.z(), s.cdot.x(), s.cdot.y(), s.cdot.z(), s.phi.x(),
                 s.phi.y(), s.phi.z(), s.phidot.x(), s.phidot.y(), s.phidot.z()});
        if (tc >= t_end) break;
    }
}

}  // namespace qj::thrust
