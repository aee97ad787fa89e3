#include "qj/quadruped.hpp"

#include <cmath>

#include <Eigen/SVD>

namespace qj::quadruped {

Vec3 QuadrupedModel::inertia_diag() const {
    const double lx = trunk_box.x(), ly = trunk_box.y(), lz = trunk_box.z();
    return (mass / 12.0) * Vec3(ly * ly + lz * lz, lx * lx + lz * lz, lx * lx + ly * ly);
}

double QuadrupedModel::stance_height() const {
    return thigh * std::cos(q_default[1]) + shank * std::cos(q_default[1] + q_default[2]);
}

std::array<Vec3, 4> QuadrupedModel::default_stance_feet(const Vec3& com) const {
    std::array<Vec3, 4> feet;
    for (int leg = 0; leg < 4; ++leg) {
        Vec3 q = q_default;
        feet[leg] = com + hip_offsets[leg] + leg_fk(*this, q, leg);
    }
    return feet;
}

QuadrupedModel QuadrupedModel::from_config(const Config& cfg) {
    QuadrupedModel m;
    const std::string sec = "robot";
    m.mass = cfg.get_num(sec, "mass", m.mass);
    m.plant_mass = m.mass;
    auto v3 = [&](const char* key, Vec3 fallback) {
        const auto v = cfg.get_vec(sec, key, {fallback.x(), fallback.y(), fallback.z()});
        if (v.size() != 3) throw ConfigError(std::string(key) + ": expected 3 numbers");
        return Vec3(v[0], v[1], v[2]);
    };
    m.trunk_box = v3("inertia_box_dims", m.trunk_box);
    if (cfg.has(sec, "hip_offsets")) {
        const auto v = cfg.get_vec(sec, "hip_offsets");
        if (v.size() != 12) throw ConfigError("hip_offsets: expected 12 numbers (FL FR RL RR)");
        for (int leg = 0; leg < 4; ++leg)
            m.hip_offsets[leg] = Vec3(v[3 * leg], v[3 * leg + 1], v[3 * leg + 2]);
    }
    if (cfg.has(sec, "link_lengths")) {
        const auto v = cfg.get_vec(sec, "link_lengths");
        if (v.size() != 3) throw ConfigError("link_lengths: expected hip thigh shank");
        m.hip_lateral = v[0];
        m.thigh = v[1];
        m.shank = v[2];
    }
    m.q_default = v3("q_default", m.q_default);
    if (cfg.has(sec, "q_limits")) {
        const auto v = cfg.get_vec(sec, "q_limits");
        if (v.size() != 6) throw ConfigError("q_limits: expected min max per joint (6 numbers)");
        m.q_min = Vec3(v[0], v[2], v[4]);
        m.q_max = Vec3(v[1], v[3], v[5]);
        for (int j = 0; j < 3; ++j)
            if (m.q_min[j] > m.q_max[j]) throw ConfigError("q_limits: min above max");
    }
    m.qdot_max = v3("qdot_max", m.qdot_max);
    m.tau_max = v3("tau_max", m.tau_max);
    m.kp = cfg.get_num(sec, "kp", m.kp);
    m.kd = cfg.get_num(sec, "kd", m.kd);
    if (!(m.mass > 0)) throw ConfigError("mass must be positive");
    if (!(m.hip_lateral > 0 && m.thigh > 0 && m.shank > 0))
        throw ConfigError("link lengths must be positive");
    return m;
}

Vec3 leg_fk(const QuadrupedModel& m, const Vec3& q, int leg) {
    const double s1 = std::sin(q[0]), c1 = std::cos(q[0]);
    const double s2 = std::sin(q[1]), c2 = std::cos(q[1]);
    const double s23 = std::sin(q[1] + q[2]), c23 = std::cos(q[1] + q[2]);
    const double off = m.side_sign(leg) * m.hip_lateral;
    const double x = -m.thigh * s2 - m.shank * s23;
    const double zp = -m.thigh * c2 - m.shank * c23;  // leg-plane depth
    return Vec3(x, c1 * off - s1 * zp, s1 * off + c1 * zp);
}

Vec3 leg_ik(const QuadrupedModel& m, const Vec3& p, int leg) {
    const double off = m.side_sign(leg) * m.hip_lateral;
    const double l0 = m.hip_lateral, l1 = m.thigh, l2 = m.shank;

    const double yz2 = p.y() * p.y() + p.z() * p.z();
    if (yz2 < l0 * l0 - 1e-15)
        throw WorkspaceError("leg_ik: foot inside the abduction cylinder",
                             l0 - std::sqrt(std::max(yz2, 0.0)));
    const double zp = -std::sqrt(std::max(yz2 - l0 * l0, 0.0));
    const double q1 = std::atan2(p.z(), p.y()) - std::atan2(zp, off);

    const double d2 = p.x() * p.x() + zp * zp;
    const double d = std::sqrt(d2);
    const double reach = l1 + l2;
    if (d > reach + 1e-9)
        throw WorkspaceError("leg_ik: foot beyond full leg extension", d - reach);
    const double min_reach = std::abs(l1 - l2);
    if (d < min_reach - 1e-9)
        throw WorkspaceError("leg_ik: foot inside full leg retraction", min_reach - d);

    double cq3 = (d2 - l1 * l1 - l2 * l2) / (2.0 * l1 * l2);
    cq3 = std::clamp(cq3, -1.0, 1.0);  // reachability already verified
    const double q3 = std::acos(cq3);  // knee-bent-backward branch (q3 >= 0)
    const double q2 =
        std::atan2(-p.x(), -zp) - std::atan2(l2 * std::sin(q3), l1 + l2 * std::cos(q3));
    return Vec3(wrap_angle(q1), wrap_angle(q2), q3);
}

Mat3 leg_jacobian(const QuadrupedModel& m, const Vec3& q, int leg) {
    const double s1 = std::sin(q[0]), c1 = std::cos(q[0]);
    const double s2 = std::sin(q[1]), c2 = std::cos(q[1]);
    const double s23 = std::sin(q[1] + q[2]), c23 = std::cos(q[1] + q[2]);
    const double off = m.side_sign(leg) * m.hip_lateral;
    const double x = -m.thigh * s2 - m.shank * s23;
    const double zp = -m.thigh * c2 - m.shank * c23;
    Mat3 j;
    j(0, 0) = 0.0;
    j(0, 1) = zp;
    j(0, 2) = -m.shank * c23;
    j(1, 0) = -s1 * off - c1 * zp;
    j(1, 1) = s1 * x;
    j(1, 2) = -s1 * m.shank * s23;
    j(2, 0) = c1 * off - s1 * zp;
    j(2, 1) = -c1 * x;
    j(2, 2) = c1 * m.shank * s23;
    return j;
}

Vec12 whole_body_ik(const QuadrupedModel& m, const BasePose& pose,
                    const std::array<Vec3, 4>& foot_world) {
    const Mat3 r = euler_zyx_to_rot(pose.rpy);
    Vec12 q;
    for (int leg = 0; leg < 4; ++leg) {
        const Vec3 foot_hip = r.transpose() * (foot_world[leg] - pose.position) -
                              m.hip_offsets[leg];
        try {
            q.segment<3>(3 * leg) = leg_ik(m, foot_hip, leg);
        } catch (const WorkspaceError& e) {
            throw WorkspaceError(std::string("whole_body_ik: leg ") + kLegNames[leg] + ": " +
                                     e.what(),
                                 e.closest_reach_gap);
        }
    }
    return q;
}

Vec12 stance_joint_velocities(const QuadrupedModel& m, const BasePose& pose,
                              const BaseTwist& twist, const Vec12& q,
                              const std::array<Vec3, 4>& foot_world) {
    const Mat3 r = euler_zyx_to_rot(pose.rpy);
    Vec12 qdot;
    for (int leg = 0; leg < 4; ++leg) {
        // Pinned foot: 0 = v + w x (p - c) + R J qdot
        const Vec3 rel = -(twist.linear + twist.angular.cross(foot_world[leg] - pose.position));
        const Mat3 j = leg_jacobian(m, q.segment<3>(3 * leg), leg);
        qdot.segment<3>(3 * leg) = j.partialPivLu().solve(r.transpose() * rel);
    }
    return qdot;
}

GravityComp gravity_ff(const StanceState& stance, const QuadrupedModel& m, double g) {
    // Support wrench at the COM distributed over the four contacts:
    // [sum f_i; sum (p_i - c) x f_i] = [0 0 m*g, 0 0 0]
    Eigen::Matrix<double, 6, 12> a;
    for (int leg = 0; leg < 4; ++leg) {
        const Vec3 rvec = stance.foot_world[leg] - stance.pose.position;
        a.block<3, 3>(0, 3 * leg) = Mat3::Identity();
        Mat3 skew;
        skew << 0, -rvec.z(), rvec.y(), rvec.z(), 0, -rvec.x(), -rvec.y(), 0, rvec.x();
        a.block<3, 3>(3, 3 * leg) = skew;
    }
    Vec6 wrench = Vec6::Zero();
    wrench[2] = m.mass * g;

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(kPinvTolerance);
    if (svd.rank() < 6) throw SingularityError("gravity_ff: rank-deficient contact Jacobian");
    const Eigen::VectorXd f = svd.solve(wrench);

    const Mat3 r = euler_zyx_to_rot(stance.pose.rpy);
    GravityComp out;
    for (int leg = 0; leg < 4; ++leg) {
        out.forces[leg] = f.segment<3>(3 * leg);
        const Mat3 j = leg_jacobian(m, stance.q.segment<3>(3 * leg), leg);
        out.tau.segment<3>(3 * leg) = -(r * j).transpose() * out.forces[leg];
    }
    return out;
}

Vec12 pd_control(const Vec12& q_d, const Vec12& qdot_d, const Vec12& q, const Vec12& qdot,
                 const Vec12& tau_ff, const QuadrupedModel& m) {
    Vec12 tau = m.kp * (q_d - q) + m.kd * (qdot_d - qdot) + tau_ff;
    for (int i = 0; i < 12; ++i) {
        const double lim = m.tau_max[i % 3];
        tau[i] = std::clamp(tau[i], -lim, lim);
    }
    return tau;
}

double leg_condition_number(const QuadrupedModel& m, const Vec3& q_leg, int leg) {
    const Mat3 j = leg_jacobian(m, q_leg, leg);
    Eigen::JacobiSVD<Mat3> svd(j);
    const double smin = svd.singularValues()(2);
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    return svd.singularValues()(0) / smin;
}

Vec3 contact_force(const QuadrupedModel& m, const Vec3& q_leg, const Vec3& tau_leg, int leg) {
    if (leg_condition_number(m, q_leg, leg) > kSingularityCondition)
        throw SingularityError("contact_force: leg Jacobian near singular");
    const Mat3 j = leg_jacobian(m, q_leg, leg);
    return -j.transpose().partialPivLu().solve(tau_leg);
}

}  // namespace qj::quadruped
