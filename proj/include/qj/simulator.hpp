#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qj/ballistics.hpp"
#include "qj/math.hpp"
#include "qj/quadruped.hpp"
#include "qj/thrust.hpp"

namespace qj::sim {

enum class Mode { kIdeal, kTracked };

Mode mode_from_string(const std::string& s);  // "ideal" | "tracked"
const char* to_string(Mode m);

// Canonical penalty keys; also the column names of metric files.
namespace penalty {
inline constexpr const char* kJointPosition = "joint_position";
inline constexpr const char* kJointVelocity = "joint_velocity";
inline constexpr const char* kJointTorque = "joint_torque";
inline constexpr const char* kFriction = "friction";
inline constexpr const char* kUnilateral = "unilateral";
inline constexpr const char* kSingularity = "singularity";
inline constexpr const char* kLiftoffTracking = "liftoff_tracking";
inline constexpr const char* kTargetOrientation = "target_orientation";
inline constexpr const char* kTouchdownDrift = "touchdown_drift";
inline constexpr const char* kTouchdownSpin = "touchdown_spin";
inline constexpr const char* kActionClip = "action_clip";
}  // namespace penalty

// All canonical keys in fixed reporting order.
const std::vector<std::string>& penalty_keys();

// Two-level height field: start plateau and landing plateau, split by which
// anchor is horizontally closer. Collision/touchdown checks arm only once a
// point has been above its local surface, so plateau edges cannot clip a
// body that legitimately starts below the landing level.
struct Terrain {
    double z_start = 0.0;
    double z_target = 0.0;
    Eigen::Vector2d start_xy{0.0, 0.0};
    Eigen::Vector2d target_xy{0.0, 0.0};
    double z_at(double x, double y) const;
};

struct EpisodeConfig {
    Mode mode = Mode::kIdeal;
    double dt = 0.001;            // s
    double timeout = 1.5;         // s
    double friction_mu = 0.8;
    double path_check_dt = 0.01;  // reference-penalty sampling period (ideal mode)
    double floor_clearance = 0.15;
    Vec3 q_retract{0.0, -1.3, 2.5};  // flight retraction pose
    uint64_t seed = 0;
    bool uarm_literal_lerp = false;
    double g = kGravity;
};

enum class Failure { kNone, kFilterRejected, kNonFootContact, kUnreachableReference };

const char* to_string(Failure f);

struct TouchdownEvent {
    double time = 0.0;  // episode time, s
    Vec3 com = Vec3::Zero();
    Vec3 rpy = Vec3::Zero();
    Vec3 lin_vel = Vec3::Zero();
    Vec3 euler_rates = Vec3::Zero();
};

struct EpisodeOutcome {
    // Achieved lift-off twist (the commanded one in ideal mode).
    Vec3 liftoff_c = Vec3::Zero(), liftoff_cdot = Vec3::Zero();
    Vec3 liftoff_phi = Vec3::Zero(), liftoff_phidot = Vec3::Zero();
    double liftoff_time = 0.0;
    std::optional<TouchdownEvent> touchdown;
    Vec3 final_c = Vec3::Zero();
    Vec3 final_phi = Vec3::Zero();
    std::map<std::string, double> penalties;
    int bounce_count = 0;
    Failure failure = Failure::kNone;
    std::optional<ballistics::LandingPrediction> prediction;
    // Start pose and target, echoed for reward evaluation.
    Vec3 start_c = Vec3::Zero(), target_c = Vec3::Zero(), target_phi = Vec3::Zero();
};

struct TraceRow {
    double t = 0.0;
    Vec3 c = Vec3::Zero(), rpy = Vec3::Zero();
    Vec3 cdot = Vec3::Zero(), euler_rates = Vec3::Zero();
    Vec12 q = Vec12::Zero(), qdot = Vec12::Zero(), tau = Vec12::Zero();
    std::array<Vec3, 4> foot_force{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
};

void write_trace_csv(const std::vector<TraceRow>& rows, const std::string& path);

// Episode engine. The step-wise interface is exposed for tests; run() drives
// the full pipeline (clip -> decode -> filter -> thrust -> flight -> touchdown
// -> settle).
class Episode {
public:
    Episode(const quadruped::QuadrupedModel& model, const thrust::JumpCommand& command,
            const Vec13& raw_action, const EpisodeConfig& cfg);

    EpisodeOutcome run(std::vector<TraceRow>* trace = nullptr);

    bool rejected() const { return rejected_; }
    const thrust::ThrustTrajectory* trajectory() const;

    // One thrust integration step (tracked mode; feet pinned).
    void thrust_step(std::vector<TraceRow>* trace = nullptr);
    // thrust_step with the reference frozen at the nominal stance; also the
    // post-touchdown settling step.
    void hold_step(std::vector<TraceRow>* trace = nullptr);
    // One ballistic flight step (call begin_flight first).
    void flight_step();
    // Touchdown test against the current flight state.
    std::optional<TouchdownEvent> detect_touchdown() const;
    // Anchor the ballistic phase at the current state.
    void begin_flight();

    // Current trunk state (for step-level tests).
    const quadruped::BasePose& pose() const { return pose_; }
    quadruped::BasePose& pose() { return pose_; }
    const quadruped::BaseTwist& twist() const { return twist_; }
    quadruped::BaseTwist& twist() { return twist_; }
    const Vec3& euler_rates() const { return euler_rates_; }
    void set_euler_rates(const Vec3& r) { euler_rates_ = r; }
    double time() const { return time_; }
    const std::array<Vec3, 4>& stance_feet() const { return feet_; }
    const EpisodeOutcome& outcome() const { return outcome_; }
    Vec12 flight_joint_targets(double flight_time) const;
    double heuristic_apex_time() const { return flight_T_apex_; }
    double heuristic_landing_time() const { return flight_T_land_; }

private:
    struct StepForces {
        int active_legs = 0;
        bool ik_failed = false;
    };

    void evaluate_reference_penalties();
    StepForces stance_dynamics_step(const Vec12& q_d, const Vec12& qdot_d, bool accrue_path,
                                    std::vector<TraceRow>* trace,
                                    double until = std::numeric_limits<double>::infinity());
    void record_liftoff();
    void run_flight_and_landing(std::vector<TraceRow>* trace);
    bool settle_tracked(std::vector<TraceRow>* trace);  // true when it bounced back up
    void finalize();
    Vec12 joint_refs(const thrust::ReferenceSample& ref, Vec12* qdot_ref) const;
    Vec3 flight_foot_world(double s, int leg) const;
    void update_arming();
    bool trunk_contact() const;
    double terrain_under(double x, double y) const { return terrain_.z_at(x, y); }
    void accrue(const char* key, double amount);

    const quadruped::QuadrupedModel& model_;
    thrust::JumpCommand command_;
    EpisodeConfig cfg_;
    Vec3 c0_, phi0_, c_tg_, phi_tg_;
    thrust::ClipResult clip_;
    std::optional<thrust::LiftoffBoundary> boundary_;
    std::optional<thrust::ThrustTrajectory> traj_;
    Terrain terrain_;
    bool rejected_ = false;

    quadruped::BasePose pose_;
    quadruped::BaseTwist twist_;
    Vec3 euler_rates_ = Vec3::Zero();
    std::array<Vec3, 4> feet_{};
    double time_ = 0.0;

    double flight_started_ = 0.0;
    Vec3 flight_c0_ = Vec3::Zero(), flight_v0_ = Vec3::Zero();
    Vec3 flight_phi0_ = Vec3::Zero(), flight_rates_ = Vec3::Zero();
    double flight_T_apex_ = 0.0, flight_T_land_ = 0.0;
    Vec12 q_liftoff_ = Vec12::Zero();
    std::array<bool, 4> foot_armed_{};
    std::array<double, 4> foot_level_{};
    std::array<bool, 8> corner_armed_{};
    std::array<double, 8> corner_level_{};
    std::array<Vec3, 8> corner_offsets_{};

    EpisodeOutcome outcome_;
};

EpisodeOutcome run_episode(const quadruped::QuadrupedModel& model,
                           const thrust::JumpCommand& command, const Vec13& raw_action,
                           const EpisodeConfig& cfg, std::vector<TraceRow>* trace = nullptr);

// Plant-side parameter perturbation: mass scaled by p*U(-1,1), viscous joint
// damping d_max*U(0,1). The controller keeps the nominal values.
quadruped::QuadrupedModel perturb_model(const quadruped::QuadrupedModel& model, uint64_t seed,
                                        double p, double d_max);

}  // namespace qj::sim
