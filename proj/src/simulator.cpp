#include "qj/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "qj/csv.hpp"
#include "qj/reward.hpp"
#include "qj/rng.hpp"

namespace qj::sim {

Mode mode_from_string(const std::string& s) {
    if (s == "ideal") return Mode::kIdeal;
    if (s == "tracked") return Mode::kTracked;
    throw std::invalid_argument("unknown mode: " + s + " (expected ideal|tracked)");
}

const char* to_string(Mode m) { return m == Mode::kIdeal ? "ideal" : "tracked"; }

const char* to_string(Failure f) {
    switch (f) {
        case Failure::kNone: return "none";
        case Failure::kFilterRejected: return "filter-rejected";
        case Failure::kNonFootContact: return "non-foot-contact";
        case Failure::kUnreachableReference: return "unreachable-reference";
    }
    return "unknown";
}

const std::vector<std::string>& penalty_keys() {
    static const std::vector<std::string> keys = {
        penalty::kJointPosition,   penalty::kJointVelocity,     penalty::kJointTorque,
        penalty::kFriction,        penalty::kUnilateral,        penalty::kSingularity,
        penalty::kLiftoffTracking, penalty::kTargetOrientation, penalty::kTouchdownDrift,
        penalty::kTouchdownSpin,   penalty::kActionClip};
    return keys;
}

double Terrain::z_at(double x, double y) const {
    const double ds = (Eigen::Vector2d(x, y) - start_xy).squaredNorm();
    const double dt = (Eigen::Vector2d(x, y) - target_xy).squaredNorm();
    return dt <= ds ? z_target : z_start;
}

namespace {

constexpr double kArmEpsilon = 1e-7;
constexpr double kTimeEps = 1e-12;

// Smoothstep = cubic Hermite with zero boundary velocities.
double hermite01(double u) {
    u = std::clamp(u, 0.0, 1.0);
    return u * u * (3.0 - 2.0 * u);
}

Vec12 tile_legs(const Vec3& per_leg) {
    Vec12 out;
    for (int leg = 0; leg < 4; ++leg) out.segment<3>(3 * leg) = per_leg;
    return out;
}

}  // namespace

Episode::Episode(const quadruped::QuadrupedModel& model, const thrust::JumpCommand& command,
                 const Vec13& raw_action, const EpisodeConfig& cfg)
    : model_(model), command_(command), cfg_(cfg) {
    c0_ = Vec3(0.0, 0.0, model.stance_height());
    phi0_ = Vec3::Zero();
    c_tg_ = c0_ + command.delta_c;
    phi_tg_ = phi0_ + command.delta_phi;

    clip_ = thrust::clip_action(raw_action);
    outcome_.penalties[penalty::kActionClip] = clip_.excess.sum();
    outcome_.start_c = c0_;
    outcome_.target_c = c_tg_;
    outcome_.target_phi = phi_tg_;

    boundary_ = thrust::decode(clip_.action, c0_, phi0_, c_tg_);
    const ballistics::FilterResult filter =
        ballistics::safety_filter({boundary_->c_lo_e, boundary_->cdot_lo_e}, c_tg_, cfg_.g);
    if (!filter.accepted) {
        rejected_ = true;
        outcome_.failure = Failure::kFilterRejected;
        outcome_.final_c = c0_;
        outcome_.final_phi = phi0_;
        return;
    }
    outcome_.prediction = filter.prediction;
    traj_.emplace(thrust::build_trajectory(c0_, Vec3::Zero(), phi0_, Vec3::Zero(), *boundary_,
                                           cfg_.uarm_literal_lerp));

    terrain_.z_start = 0.0;
    terrain_.z_target = c_tg_.z() - model_.stance_height();
    terrain_.start_xy = c0_.head<2>();
    terrain_.target_xy = c_tg_.head<2>();

    pose_.position = c0_;
    pose_.rpy = phi0_;
    feet_ = model_.default_stance_feet(c0_);
    q_liftoff_ = tile_legs(model_.q_default);

    int i = 0;
    for (int sx : {-1, 1})
        for (int sy : {-1, 1})
            for (int sz : {-1, 1})
                corner_offsets_[i++] = 0.5 * Vec3(sx * model_.trunk_box.x(),
                                                  sy * model_.trunk_box.y(),
                                                  sz * model_.trunk_box.z());
}

const thrust::ThrustTrajectory* Episode::trajectory() const { return traj_ ? &*traj_ : nullptr; }

void Episode::accrue(const char* key, double amount) {
    if (amount != 0.0) outcome_.penalties[key] += amount;
}

Vec12 Episode::joint_refs(const thrust::ReferenceSample& ref, Vec12* qdot_ref) const {
    const quadruped::BasePose pose{ref.c, ref.phi};
    const Vec12 q = quadruped::whole_body_ik(model_, pose, feet_);
    if (qdot_ref) {
        quadruped::BaseTwist twist;
        twist.linear = ref.cdot;
        twist.angular = euler_rate_map(ref.phi) * ref.phidot;
        *qdot_ref = quadruped::stance_joint_velocities(model_, pose, twist, q, feet_);
    }
    return q;
}

void Episode::evaluate_reference_penalties() {
    // Kinematic path checks along the reference; tracking-related penalties
    // stay zero in ideal mode by construction.
    const double t_end = boundary_->t_th;
    const double dt = cfg_.path_check_dt;
    for (double t = 0.0;; t += dt) {
        const double tc = std::min(t, t_end);
        const thrust::ReferenceSample ref = thrust::sample(*traj_, tc);
        try {
            Vec12 qdot;
            const Vec12 q = joint_refs(ref, &qdot);
            for (int i = 0; i < 12; ++i) {
                const int j = i % 3;
                accrue(penalty::kJointPosition,
                       dt * reward::activation(q[i], model_.q_min[j], model_.q_max[j]));
                accrue(penalty::kJointVelocity,
                       dt * reward::activation(qdot[i], -model_.qdot_max[j], model_.qdot_max[j]));
            }
            for (int leg = 0; leg < 4; ++leg) {
                if (quadruped::leg_condition_number(model_, q.segment<3>(3 * leg), leg) >
                    quadruped::kSingularityCondition)
                    accrue(penalty::kSingularity, dt);
            }
        } catch (const quadruped::WorkspaceError&) {
            // Unreachable reference sample counts as boundary singularity.
            accrue(penalty::kSingularity, dt);
        }
        if (tc >= t_end) break;
    }
}

Episode::StepForces Episode::stance_dynamics_step(const Vec12& q_d, const Vec12& qdot_d,
                                                  bool accrue_path, std::vector<TraceRow>* trace,
                                                  double until) {
    StepForces result;
    const double dt = std::min(cfg_.dt, std::min(cfg_.timeout, until) - time_);
    if (dt <= 0.0) return result;

    Vec12 q, qdot;
    try {
        q = quadruped::whole_body_ik(model_, pose_, feet_);
        qdot = quadruped::stance_joint_velocities(model_, pose_, twist_, q, feet_);
    } catch (const quadruped::WorkspaceError&) {
        result.ik_failed = true;
        return result;
    }

    quadruped::StanceState stance{pose_, twist_, q, qdot, feet_};
    Vec12 tau_ff = Vec12::Zero();
    try {
        tau_ff = quadruped::gravity_ff(stance, model_, cfg_.g).tau;
    } catch (const quadruped::SingularityError&) {
        if (accrue_path) accrue(penalty::kSingularity, dt);
    }

    const Vec12 tau_raw = model_.kp * (q_d - q) + model_.kd * (qdot_d - qdot) + tau_ff;
    const Vec12 tau = quadruped::pd_control(q_d, qdot_d, q, qdot, tau_ff, model_);

    if (accrue_path) {
        for (int i = 0; i < 12; ++i) {
            const int j = i % 3;
            accrue(penalty::kJointPosition,
                   dt * reward::activation(q[i], model_.q_min[j], model_.q_max[j]));
            accrue(penalty::kJointVelocity,
                   dt * reward::activation(qdot[i], -model_.qdot_max[j], model_.qdot_max[j]));
            accrue(penalty::kJointTorque,
                   dt * reward::activation(tau_raw[i], -model_.tau_max[j], model_.tau_max[j]));
        }
    }

    // Plant-side torque: commanded torque minus viscous joint damping.
    const Vec12 tau_plant = tau - model_.joint_damping * qdot;

    const Mat3 rot = euler_zyx_to_rot(pose_.rpy);
    Vec3 force_sum = Vec3::Zero();
    Vec3 moment_sum = Vec3::Zero();
    std::array<Vec3, 4> foot_force{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
    for (int leg = 0; leg < 4; ++leg) {
        const Vec3 q_leg = q.segment<3>(3 * leg);
        if (quadruped::leg_condition_number(model_, q_leg, leg) >
            quadruped::kSingularityCondition) {
            if (accrue_path) accrue(penalty::kSingularity, dt);
            continue;  // no reliable force transmission through a singular leg
        }
        const Mat3 jac = quadruped::leg_jacobian(model_, q_leg, leg);
        const Vec3 tau_leg = tau_plant.segment<3>(3 * leg);
        Vec3 f = rot * Vec3(-jac.transpose().partialPivLu().solve(tau_leg));
        if (f.z() < 0.0) {
            // Unilaterality: a pulling contact transmits nothing this step.
            if (accrue_path) accrue(penalty::kUnilateral, dt * (-f.z()));
            continue;
        }
        const double tangential = f.head<2>().norm();
        const double limit = cfg_.friction_mu * f.z();
        if (tangential > limit) {
            if (accrue_path) accrue(penalty::kFriction, dt * (tangential - limit));
            if (tangential > 0.0) f.head<2>() *= limit / tangential;
        }
        foot_force[leg] = f;
        force_sum += f;
        moment_sum += (feet_[leg] - pose_.position).cross(f);
        ++result.active_legs;
    }

    // Semi-implicit Euler on the trunk; diagonal-inertia angular dynamics.
    const Vec3 gvec(0.0, 0.0, -cfg_.g);
    twist_.linear += dt * (force_sum / model_.plant_mass + gvec);
    pose_.position += dt * twist_.linear;
    const Vec3 inertia = model_.inertia_diag() * (model_.plant_mass / model_.mass);
    twist_.angular += dt * Vec3(moment_sum.cwiseQuotient(inertia));
    euler_rates_ = euler_rates_from_omega(pose_.rpy, twist_.angular);
    pose_.rpy += dt * euler_rates_;
    time_ += dt;

    if (trace) {
        TraceRow row;
        row.t = time_;
        row.c = pose_.position;
        row.rpy = pose_.rpy;
        row.cdot = twist_.linear;
        row.euler_rates = euler_rates_;
        row.q = q;
        row.qdot = qdot;
        row.tau = tau;
        row.foot_force = foot_force;
        trace->push_back(row);
    }
    return result;
}

void Episode::thrust_step(std::vector<TraceRow>* trace) {
    const double t_end = std::min(boundary_->t_th, cfg_.timeout);
    if (time_ >= t_end - kTimeEps) return;
    const double t_ref = std::min(time_ + cfg_.dt, boundary_->t_th);
    const thrust::ReferenceSample ref = thrust::sample(*traj_, t_ref);
    Vec12 q_d, qdot_d;
    try {
        q_d = joint_refs(ref, &qdot_d);
    } catch (const quadruped::WorkspaceError&) {
        outcome_.failure = Failure::kUnreachableReference;
        return;
    }
    const StepForces step =
        stance_dynamics_step(q_d, qdot_d, /*accrue_path=*/true, trace, boundary_->t_th);
    if (step.ik_failed) outcome_.failure = Failure::kUnreachableReference;
}

void Episode::hold_step(std::vector<TraceRow>* trace) {
    stance_dynamics_step(tile_legs(model_.q_default), Vec12::Zero(), /*accrue_path=*/false,
                         trace);
}

void Episode::record_liftoff() {
    outcome_.liftoff_c = pose_.position;
    outcome_.liftoff_cdot = twist_.linear;
    outcome_.liftoff_phi = pose_.rpy;
    outcome_.liftoff_phidot = euler_rates_;
    outcome_.liftoff_time = time_;
    Eigen::Matrix<double, 12, 1> err;
    err << pose_.position - boundary_->c_lo_e, twist_.linear - boundary_->cdot_lo_e,
        pose_.rpy - boundary_->phi_lo, euler_rates_ - boundary_->phidot_lo;
    accrue(penalty::kLiftoffTracking, err.norm());
}

void Episode::begin_flight() {
    flight_started_ = time_;
    flight_c0_ = pose_.position;
    flight_v0_ = twist_.linear;
    flight_phi0_ = pose_.rpy;
    flight_rates_ = euler_rates_;
    const ballistics::ApexInfo ap = ballistics::apex({flight_c0_, flight_v0_}, cfg_.g);
    flight_T_apex_ = ap.time_to_apex;
    try {
        flight_T_land_ = ballistics::flight_time(flight_c0_.z(), flight_v0_.z(), c_tg_.z(), cfg_.g);
    } catch (const ballistics::UnreachableError&) {
        flight_T_land_ = std::max(cfg_.timeout - flight_started_, 0.0);
    }
    foot_armed_.fill(false);
    corner_armed_.fill(false);
    update_arming();
}

void Episode::flight_step() {
    const double dt = std::min(cfg_.dt, cfg_.timeout - time_);
    if (dt <= 0.0) return;
    const double s = time_ + dt - flight_started_;
    const Vec3 gvec(0.0, 0.0, -cfg_.g);
    pose_.position = flight_c0_ + flight_v0_ * s + 0.5 * s * s * gvec;
    twist_.linear = flight_v0_ + s * gvec;
    pose_.rpy = flight_phi0_ + s * flight_rates_;
    euler_rates_ = flight_rates_;
    twist_.angular = euler_rate_map(pose_.rpy) * euler_rates_;
    time_ += dt;
}

Vec12 Episode::flight_joint_targets(double s) const {
    const Vec12 q_retract = tile_legs(cfg_.q_retract);
    const Vec12 q_default = tile_legs(model_.q_default);
    const double t_apex = flight_T_apex_;
    const double t_land = flight_T_land_;
    if (t_land <= t_apex || t_apex <= 0.0) {
        // No usable retraction window: blend straight to the landing pose.
        const double u = t_land > 0.0 ? s / t_land : 1.0;
        return q_liftoff_ + hermite01(u) * (q_default - q_liftoff_);
    }
    if (s < t_apex) return q_liftoff_ + hermite01(s / t_apex) * (q_retract - q_liftoff_);
    return q_retract + hermite01((s - t_apex) / (t_land - t_apex)) * (q_default - q_retract);
}

Vec3 Episode::flight_foot_world(double s, int leg) const {
    const Vec12 q = flight_joint_targets(s);
    const Vec3 gvec(0.0, 0.0, -cfg_.g);
    const Vec3 com = flight_c0_ + flight_v0_ * s + 0.5 * s * s * gvec;
    const Mat3 rot = euler_zyx_to_rot(Vec3(flight_phi0_ + s * flight_rates_));
    return com + rot * (model_.hip_offsets[leg] +
                        quadruped::leg_fk(model_, q.segment<3>(3 * leg), leg));
}

void Episode::update_arming() {
    const double s = time_ - flight_started_;
    for (int leg = 0; leg < 4; ++leg) {
        const Vec3 p = flight_foot_world(s, leg);
        const double tz = terrain_under(p.x(), p.y());
        // Re-arm per surface level: crossing the plateau boundary resets the
        // check until the point clears the new level.
        if (foot_armed_[leg] && tz != foot_level_[leg]) foot_armed_[leg] = false;
        if (p.z() > tz + kArmEpsilon) {
            foot_armed_[leg] = true;
            foot_level_[leg] = tz;
        }
    }
    const Mat3 rot = euler_zyx_to_rot(pose_.rpy);
    for (int i = 0; i < 8; ++i) {
        const Vec3 p = pose_.position + rot * corner_offsets_[i];
        const double tz = terrain_under(p.x(), p.y());
        if (corner_armed_[i] && tz != corner_level_[i]) corner_armed_[i] = false;
        if (p.z() > tz + kArmEpsilon) {
            corner_armed_[i] = true;
            corner_level_[i] = tz;
        }
    }
}

bool Episode::trunk_contact() const {
    const Mat3 rot = euler_zyx_to_rot(pose_.rpy);
    for (int i = 0; i < 8; ++i) {
        if (!corner_armed_[i]) continue;
        const Vec3 p = pose_.position + rot * corner_offsets_[i];
        if (p.z() <= terrain_under(p.x(), p.y())) return true;
    }
    return false;
}

std::optional<TouchdownEvent> Episode::detect_touchdown() const {
    const double s = time_ - flight_started_;
    for (int leg = 0; leg < 4; ++leg) {
        if (!foot_armed_[leg]) continue;
        const Vec3 p = flight_foot_world(s, leg);
        if (p.z() <= terrain_under(p.x(), p.y())) {
            TouchdownEvent ev;
            ev.time = time_;
            ev.com = pose_.position;
            ev.rpy = pose_.rpy;
            ev.lin_vel = twist_.linear;
            ev.euler_rates = euler_rates_;
            return ev;
        }
    }
    return std::nullopt;
}

void Episode::run_flight_and_landing(std::vector<TraceRow>* trace) {
    begin_flight();
    while (time_ < cfg_.timeout - kTimeEps) {
        const double s_prev = time_ - flight_started_;
        flight_step();
        if (trace) {
            TraceRow row;
            row.t = time_;
            row.c = pose_.position;
            row.rpy = pose_.rpy;
            row.cdot = twist_.linear;
            row.euler_rates = euler_rates_;
            row.q = flight_joint_targets(time_ - flight_started_);
            trace->push_back(row);
        }
        if (trunk_contact()) {
            outcome_.failure = Failure::kNonFootContact;
            return;
        }
        if (detect_touchdown()) {
            // Refine the crossing instant by bisection over the closed form.
            double lo = s_prev, hi = time_ - flight_started_;
            auto clearance = [&](double s) {
                double h = std::numeric_limits<double>::infinity();
                for (int leg = 0; leg < 4; ++leg) {
                    if (!foot_armed_[leg]) continue;
                    const Vec3 p = flight_foot_world(s, leg);
                    h = std::min(h, p.z() - terrain_under(p.x(), p.y()));
                }
                return h;
            };
            if (clearance(lo) > 0.0) {
                for (int it = 0; it < 80; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (clearance(mid) > 0.0 ? lo : hi) = mid;
                }
            } else {
                hi = lo;
            }
            const double s_td = hi;
            const Vec3 gvec(0.0, 0.0, -cfg_.g);
            pose_.position = flight_c0_ + flight_v0_ * s_td + 0.5 * s_td * s_td * gvec;
            twist_.linear = flight_v0_ + s_td * gvec;
            pose_.rpy = flight_phi0_ + s_td * flight_rates_;
            euler_rates_ = flight_rates_;
            twist_.angular = euler_rate_map(pose_.rpy) * euler_rates_;
            time_ = flight_started_ + s_td;

            TouchdownEvent ev;
            ev.time = time_;
            ev.com = pose_.position;
            ev.rpy = pose_.rpy;
            ev.lin_vel = twist_.linear;
            ev.euler_rates = euler_rates_;
            if (!outcome_.touchdown)
                outcome_.touchdown = ev;
            else
                ++outcome_.bounce_count;

            // Pin the feet where they are; PD then holds the landing pose.
            const Vec12 q_td = flight_joint_targets(s_td);
            const Mat3 rot = euler_zyx_to_rot(pose_.rpy);
            for (int leg = 0; leg < 4; ++leg)
                feet_[leg] = pose_.position +
                             rot * (model_.hip_offsets[leg] +
                                    quadruped::leg_fk(model_, q_td.segment<3>(3 * leg), leg));

            if (cfg_.mode == Mode::kIdeal) {
                // Ideal episodes add nothing beyond the analytic map: the
                // pose freezes at touchdown.
                time_ = cfg_.timeout;
                return;
            }
            const bool bounced = settle_tracked(trace);
            if (bounced && time_ < cfg_.timeout - kTimeEps &&
                outcome_.failure == Failure::kNone) {
                q_liftoff_ = q_td;
                begin_flight();
                continue;
            }
            return;
        }
        update_arming();
    }
}

bool Episode::settle_tracked(std::vector<TraceRow>* trace) {
    const Vec12 q_hold = tile_legs(model_.q_default);
    const Vec12 qdot_hold = Vec12::Zero();
    int free_fall_streak = 0;
    while (time_ < cfg_.timeout - kTimeEps) {
        const StepForces step =
            stance_dynamics_step(q_hold, qdot_hold, /*accrue_path=*/false, trace);
        const bool no_support = step.ik_failed || step.active_legs == 0;
        if (step.ik_failed) {
            // Feet out of reach: the trunk falls freely this step.
            const double dt = std::min(cfg_.dt, cfg_.timeout - time_);
            const Vec3 gvec(0.0, 0.0, -cfg_.g);
            twist_.linear += dt * gvec;
            pose_.position += dt * twist_.linear;
            pose_.rpy += dt * euler_rates_;
            time_ += dt;
        }
        free_fall_streak = no_support ? free_fall_streak + 1 : 0;
        if (free_fall_streak >= 3 && twist_.linear.z() > 0.0 && outcome_.bounce_count < 8)
            return true;  // airborne again, moving up: a bounce
    }
    return false;
}

void Episode::finalize() {
    outcome_.final_c = pose_.position;
    outcome_.final_phi = pose_.rpy;
    if (rejected_) return;  // penalties stay as action clip only
    Vec3 phi_err = outcome_.final_phi - phi_tg_;
    for (int i = 0; i < 3; ++i) phi_err[i] = wrap_angle(phi_err[i]);
    accrue(penalty::kTargetOrientation, phi_err.norm());
    if (outcome_.touchdown) {
        accrue(penalty::kTouchdownSpin, outcome_.touchdown->euler_rates.norm());
        const Eigen::Vector2d drift =
            outcome_.final_c.head<2>() - outcome_.touchdown->com.head<2>();
        accrue(penalty::kTouchdownDrift, drift.norm());
    }
}

EpisodeOutcome Episode::run(std::vector<TraceRow>* trace) {
    if (rejected_) return outcome_;
    const double t_th = boundary_->t_th;
    if (cfg_.mode == Mode::kIdeal) {
        evaluate_reference_penalties();
        time_ = std::min(t_th, cfg_.timeout);
        pose_.position = boundary_->c_lo_e;
        pose_.rpy = boundary_->phi_lo;
        twist_.linear = boundary_->cdot_lo_e;
        euler_rates_ = boundary_->phidot_lo;
        twist_.angular = euler_rate_map(pose_.rpy) * euler_rates_;
        try {
            q_liftoff_ = joint_refs(thrust::sample(*traj_, t_th), nullptr);
        } catch (const quadruped::WorkspaceError&) {
            q_liftoff_ = tile_legs(model_.q_default);
        }
        outcome_.liftoff_c = pose_.position;
        outcome_.liftoff_cdot = twist_.linear;
        outcome_.liftoff_phi = pose_.rpy;
        outcome_.liftoff_phidot = euler_rates_;
        outcome_.liftoff_time = time_;
    } else {
        const double t_end = std::min(t_th, cfg_.timeout);
        while (time_ < t_end - kTimeEps && outcome_.failure == Failure::kNone)
            thrust_step(trace);
        try {
            q_liftoff_ = quadruped::whole_body_ik(model_, pose_, feet_);
        } catch (const quadruped::WorkspaceError&) {
            q_liftoff_ = tile_legs(model_.q_default);
        }
        record_liftoff();
    }
    if (time_ < cfg_.timeout - kTimeEps) run_flight_and_landing(trace);
    finalize();
    return outcome_;
}

EpisodeOutcome run_episode(const quadruped::QuadrupedModel& model,
                           const thrust::JumpCommand& command, const Vec13& raw_action,
                           const EpisodeConfig& cfg, std::vector<TraceRow>* trace) {
    Episode ep(model, command, raw_action, cfg);
    return ep.run(trace);
}

quadruped::QuadrupedModel perturb_model(const quadruped::QuadrupedModel& model, uint64_t seed,
                                        double p, double d_max) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("perturb_model: p must be in [0, 1]");
    if (d_max < 0.0) throw std::invalid_argument("perturb_model: d_max must be >= 0");
    quadruped::QuadrupedModel out = model;
    Rng rng(derive_seed(seed, 0x7065727475726221ULL));
    out.plant_mass = model.mass + model.mass * p * rng.uniform(-1.0, 1.0);
    out.joint_damping = d_max * rng.uniform(0.0, 1.0);
    return out;
}

void write_trace_csv(const std::vector<TraceRow>& rows, const std::string& path) {
    std::vector<std::string> header = {"t",  "cx", "cy", "cz", "roll", "pitch", "yaw",
                                       "vx", "vy", "vz", "wr", "wp",   "wy"};
    for (int i = 0; i < 12; ++i) header.push_back("q" + std::to_string(i));
    for (int i = 0; i < 12; ++i) header.push_back("dq" + std::to_string(i));
    for (int i = 0; i < 12; ++i) header.push_back("tau" + std::to_string(i));
    for (int leg = 0; leg < 4; ++leg)
        for (const char* ax : {"x", "y", "z"})
            header.push_back(std::string("f") + quadruped::kLegNames[leg] + ax);
    CsvWriter csv(path, header);
    std::vector<double> row(header.size());
    for (const auto& r : rows) {
        size_t k = 0;
        row[k++] = r.t;
        for (int i = 0; i < 3; ++i) row[k++] = r.c[i];
        for (int i = 0; i < 3; ++i) row[k++] = r.rpy[i];
        for (int i = 0; i < 3; ++i) row[k++] = r.cdot[i];
        for (int i = 0; i < 3; ++i) row[k++] = r.euler_rates[i];
        for (int i = 0; i < 12; ++i) row[k++] = r.q[i];
        for (int i = 0; i < 12; ++i) row[k++] = r.qdot[i];
        for (int i = 0; i < 12; ++i) row[k++] = r.tau[i];
        for (int leg = 0; leg < 4; ++leg)
            for (int i = 0; i < 3; ++i) row[k++] = r.foot_force[leg][i];
        csv.row(row);
    }
}

}  // namespace qj::sim
