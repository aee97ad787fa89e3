#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include "qj/config.hpp"
#include "qj/math.hpp"

namespace qj::quadruped {

// Leg order used throughout: FL, FR, RL, RR.
inline constexpr std::array<const char*, 4> kLegNames = {"FL", "FR", "RL", "RR"};

// Condition-number threshold on the 3x3 leg Jacobian beyond which a stance is
// treated as singular (feeds the singularity penalty).
inline constexpr double kSingularityCondition = 1e4;

// Rank tolerance for the contact-Jacobian pseudo-inverse.
inline constexpr double kPinvTolerance = 1e-10;

struct QuadrupedModel {
    double mass = 13.0;            // controller-side mass, kg
    double plant_mass = 13.0;      // plant-side mass (perturbation target)
    Vec3 trunk_box{0.38, 0.19, 0.11};  // trunk collision/inertia box, m
    std::array<Vec3, 4> hip_offsets{Vec3(0.1881, 0.04675, 0.0), Vec3(0.1881, -0.04675, 0.0),
                                    Vec3(-0.1881, 0.04675, 0.0), Vec3(-0.1881, -0.04675, 0.0)};
    double hip_lateral = 0.08;  // abduction link, m
    double thigh = 0.213;       // m
    double shank = 0.213;       // m
    Vec3 q_default{0.0, -0.75, 1.5};
    Vec3 q_min{-1.0, -2.4, 0.05};
    Vec3 q_max{1.0, 1.2, 2.7};
    Vec3 qdot_max{20.0, 20.0, 30.0};
    Vec3 tau_max{23.7, 23.7, 35.5};
    double kp = 50.0;
    double kd = 0.8;
    double joint_damping = 0.0;  // plant-side viscous damping, N*m*s/rad

    // Homogeneous-box trunk inertia diagonal.
    Vec3 inertia_diag() const;
    // Lateral mirror: +1 for left legs, -1 for right legs.
    double side_sign(int leg) const { return (leg == 0 || leg == 2) ? 1.0 : -1.0; }
    // Standing COM height when all legs hold q_default on flat ground.
    double stance_height() const;
    // Foot positions (world) for a level stance with the COM at `com`.
    std::array<Vec3, 4> default_stance_feet(const Vec3& com) const;

    static QuadrupedModel go1_defaults() { return {}; }
    static QuadrupedModel from_config(const Config& cfg);
};

struct WorkspaceError : std::runtime_error {
    explicit WorkspaceError(const std::string& msg, double gap)
        : std::runtime_error(msg), closest_reach_gap(gap) {}
    double closest_reach_gap;  // distance to the closest reachable point, m
};

struct SingularityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Foot position in the hip frame for one leg (abduction, hip flexion, knee).
Vec3 leg_fk(const QuadrupedModel& m, const Vec3& q_leg, int leg);

// Closed-form IK, knee-bent-backward branch. Throws WorkspaceError.
Vec3 leg_ik(const QuadrupedModel& m, const Vec3& foot_hip, int leg);

// d(foot)/d(q) in the hip frame.
Mat3 leg_jacobian(const QuadrupedModel& m, const Vec3& q_leg, int leg);

struct BasePose {
    Vec3 position{0, 0, 0};
    Vec3 rpy{0, 0, 0};  // ZYX Euler (roll, pitch, yaw)
};

struct BaseTwist {
    Vec3 linear{0, 0, 0};
    Vec3 angular{0, 0, 0};  // world-frame angular velocity
};

// Joint angles for all four legs given the base pose and world foot targets.
// Throws WorkspaceError naming the offending leg.
Vec12 whole_body_ik(const QuadrupedModel& m, const BasePose& pose,
                    const std::array<Vec3, 4>& foot_world);

// Joint velocities with the feet pinned in the world (stance).
Vec12 stance_joint_velocities(const QuadrupedModel& m, const BasePose& pose,
                              const BaseTwist& twist, const Vec12& q,
                              const std::array<Vec3, 4>& foot_world);

struct StanceState {
    BasePose pose;
    BaseTwist twist;
    Vec12 q = Vec12::Zero();
    Vec12 qdot = Vec12::Zero();
    std::array<Vec3, 4> foot_world;
};

struct GravityComp {
    Vec12 tau;                    // feedforward joint torques
    std::array<Vec3, 4> forces;   // world-frame foot forces solving the wrench
};

// Gravity compensation: distributes the support wrench over the stance feet
// and maps it to joint torques. Throws SingularityError when the contact
// Jacobian is rank-deficient.
GravityComp gravity_ff(const StanceState& stance, const QuadrupedModel& m, double g = kGravity);

// Joint PD plus feedforward, clamped per joint to +-tau_max.
Vec12 pd_control(const Vec12& q_d, const Vec12& qdot_d, const Vec12& q, const Vec12& qdot,
                 const Vec12& tau_ff, const QuadrupedModel& m);

// Hip-frame contact force implied by the leg torques (massless-leg statics).
// Throws SingularityError past the condition-number threshold.
Vec3 contact_force(const QuadrupedModel& m, const Vec3& q_leg, const Vec3& tau_leg, int leg);

// Condition number of the 3x3 leg Jacobian.
double leg_condition_number(const QuadrupedModel& m, const Vec3& q_leg, int leg);

}  // namespace qj::quadruped
