// Acceptance suite: prints one pass/fail line per criterion and exits with
// the number of failures. Heavy criteria (policy training) run last.
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "qj/ballistics.hpp"
#include "qj/bezier.hpp"
#include "qj/evalsuite.hpp"
#include "qj/learner.hpp"
#include "qj/quadruped.hpp"
#include "qj/reward.hpp"
#include "qj/rng.hpp"
#include "qj/simulator.hpp"
#include "qj/thrust.hpp"

#include "oracles.hpp"

using namespace qj;
namespace fs = std::filesystem;

namespace {

struct Harness {
    int failures = 0;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            ++failures;
            detail << "    FAILED: " << what << "\n";
        }
    }
};

using Criterion = std::function<void(Harness&)>;

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

void parallel_for(int n, const std::function<void(int)>& fn) {
    const int threads = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&]() {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    for (auto& t : pool) t.join();
}

// ---------------------------------------------------------------- criterion 1
void criterion_bezier(Harness& h) {
    const double t0 = now_seconds();
    Rng rng(1001);
    double max_diff = 0.0, max_fd = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
        Eigen::MatrixXd p(3, 4);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 4; ++j) p(i, j) = rng.uniform(-2, 2);
        const double duration = rng.uniform(0.2, 3.0);
        const bezier::ControlPolygon poly(p, duration);
        const bezier::ControlPolygon der = poly.derivative();
        const double t = rng.uniform(0.0, duration);
        Eigen::VectorXd value, velocity;
        poly.eval_cubic(t, value, velocity);
        max_diff = std::max(max_diff, (value - poly.eval(t)).norm());
        max_diff = std::max(max_diff, (velocity - der.eval(t)).norm());

        const double h_fd = 1e-6;
        const double tc = std::clamp(t, h_fd, duration - h_fd);
        const Eigen::VectorXd fd = (poly.eval(tc + h_fd) - poly.eval(tc - h_fd)) / (2 * h_fd);
        const Eigen::VectorXd an = der.eval(tc);
        max_fd = std::max(max_fd, (an - fd).norm() / std::max(1.0, an.norm()));
    }
    const double elapsed = now_seconds() - t0;
    h.require(max_diff <= 1e-12, "explicit vs generic cubic <= 1e-12 (got " +
                                     std::to_string(max_diff) + ")");
    h.require(max_fd <= 1e-6, "derivative vs finite differences rel err <= 1e-6 (got " +
                                  std::to_string(max_fd) + ")");
    h.require(elapsed < 1.0, "runtime < 1 s (got " + std::to_string(elapsed) + ")");
}

// ---------------------------------------------------------------- criterion 2
void criterion_boundary(Harness& h) {
    Rng rng(1002);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        thrust::LiftoffBoundary b;
        const Vec3 c0(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.1, 0.6));
        const Vec3 cdot0(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
        b.c_lo_b = Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.1, 0.6));
        b.cdot_lo_b = Vec3(rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(0, 4));
        b.t_th_b = rng.uniform(0.4, 1.0);
        const auto pos = thrust::solve_position_bezier(c0, cdot0, b);
        Eigen::VectorXd v, d;
        pos.eval_cubic(0.0, v, d);
        worst = std::max({worst, (v - c0).norm(), (d - cdot0).norm()});
        pos.eval_cubic(b.t_th_b, v, d);
        worst = std::max({worst, (v - b.c_lo_b).norm(), (d - b.cdot_lo_b).norm()});

        const Vec3 phi0(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), rng.uniform(-1, 1));
        const Vec3 phidot0(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1));
        const Vec3 phi_lo(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.8, 0.8));
        const Vec3 phidot_lo(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-4, 4));
        const double t_th = rng.uniform(0.4, 1.3);
        const auto ori = thrust::solve_orientation_bezier(phi0, phidot0, phi_lo, phidot_lo, t_th);
        ori.eval_cubic(0.0, v, d);
        worst = std::max({worst, (v - phi0).norm(), (d - phidot0).norm()});
        ori.eval_cubic(t_th, v, d);
        worst = std::max({worst, (v - phi_lo).norm(), (d - phidot_lo).norm()});
    }
    h.require(worst <= 1e-9,
              "all eight boundary values reproduced <= 1e-9 (got " + std::to_string(worst) + ")");
}

// ---------------------------------------------------------------- criterion 3
void criterion_ballistics(Harness& h) {
    const int n = 10000;
    std::vector<double> errs(n, 0.0);
    parallel_for(n, [&](int i) {
        Rng rng(derive_seed(1003, i));
        const ballistics::BallisticState s{
            {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.1, 0.6)},
            {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(0.2, 3.0)}};
        const double z_tg = s.c_lo.z() + rng.uniform(-0.5, 0.0);
        const auto pred = ballistics::predict_landing(s, z_tg);
        const Eigen::VectorXd x =
            oracles::projectile_rk4(s.c_lo, s.cdot_lo, pred.flight_time, 1e-5);
        errs[i] = (x.head<3>() - pred.c_td).norm();
    });
    double worst = 0.0;
    for (double e : errs) worst = std::max(worst, e);
    h.require(worst <= 1e-6,
              "closed form vs RK4(1e-5) <= 1e-6 m (got " + std::to_string(worst) + ")");

    // Round trip in both directions: a lift-off state reproduces its own
    // vertical velocity from the predicted landing, and a velocity pair from
    // the hyperbolic relation lands on its descending-reach target.
    Rng rng(10031);
    double worst_rt = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
        const ballistics::BallisticState s{
            {rng.uniform(-1, 1), 0.0, rng.uniform(0.2, 0.6)},
            {rng.uniform(0.3, 3.0), 0.0, rng.uniform(0.2, 4.0)}};
        const double z_tg = s.c_lo.z() + rng.uniform(-0.3, 0.0);
        const auto pred = ballistics::predict_landing(s, z_tg);
        worst_rt = std::max(worst_rt, std::abs(ballistics::vz_of_vx(s.c_lo, pred.c_td,
                                                                    s.cdot_lo.x()) -
                                               s.cdot_lo.z()));

        const Vec3 lo(rng.uniform(-1, 1), 0.0, rng.uniform(0.3, 0.8));
        const Vec3 tg(lo.x() + rng.uniform(0.1, 1.5), 0.0, lo.z() - rng.uniform(0.0, 0.3));
        const double vx = rng.uniform(0.3, 4.0);
        const double vz = ballistics::vz_of_vx(lo, tg, vx);
        const auto filter = ballistics::safety_filter({lo, {vx, 0, vz}}, tg);
        if (filter.accepted)
            worst_rt = std::max(worst_rt, (filter.prediction->c_td - tg).norm());
    }
    h.require(worst_rt <= 1e-9,
              "hyperbolic round trip <= 1e-9 (got " + std::to_string(worst_rt) + ")");
}

// ---------------------------------------------------------------- criterion 4
void criterion_filter(Harness& h) {
    Rng rng(1004);
    int disagreements = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const ballistics::BallisticState s{
            {rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(0.1, 0.6)},
            {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-1, 4)}};
        const Vec3 tg(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-0.4, 1.0));
        const auto filter = ballistics::safety_filter(s, tg);
        const bool oracle =
            oracles::projectile_crossing_time(s.c_lo.z(), s.cdot_lo.z(), tg.z()) >= 0.0;
        if (filter.accepted != oracle) ++disagreements;
    }
    h.require(disagreements == 0, "filter vs brute force: " + std::to_string(disagreements) +
                                      " disagreements over 10000 pairs");
}

// ---------------------------------------------------------------- criterion 5
void criterion_uarm(Harness& h) {
    Rng rng(1005);
    const auto model = quadruped::QuadrupedModel::go1_defaults();
    const Vec3 c0(0, 0, model.stance_height());
    double worst_junction = 0.0, worst_exit = 0.0, worst_arc = 0.0;
    for (int trial = 0; trial < 300; ++trial) {
        thrust::JumpAction a;
        a.t_th_b = rng.uniform(0.4, 1.0);
        a.r_p = rng.uniform(0.2, 0.4);
        a.theta_p = rng.uniform(kPi / 4, kPi / 2);
        a.r_v = rng.uniform(0.5, 3.0);
        a.theta_v = rng.uniform(0.1, kPi / 2);
        a.k = rng.uniform(1.0 + 1e-6, 3.0);
        a.d = rng.uniform(0.01, 0.3);
        a.phi_lo = Vec3::Zero();
        a.phidot_lo = Vec3::Zero();
        const auto b = thrust::decode(a, c0, Vec3::Zero(), Vec3(0.8, 0, c0.z()));
        const auto traj =
            thrust::build_trajectory(c0, Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), b);

        const double eps = 1e-9;
        const auto before = thrust::sample(traj, b.t_th_b - eps);
        const auto after = thrust::sample(traj, b.t_th_b + eps);
        const double bound = b.cdot_lo_b.norm() * 2 * eps + 1e-9;
        worst_junction = std::max(worst_junction, (before.c - after.c).norm() - bound);
        worst_junction = std::max(worst_junction, (before.cdot - after.cdot).norm() - 1e-6);

        const auto end = thrust::sample(traj, b.t_th);
        worst_exit = std::max(worst_exit,
                              std::abs(end.cdot.norm() - a.k * b.cdot_lo_b.norm()));

        double arc = 0.0;
        Vec3 prev = thrust::sample(traj, b.t_th_b).c;
        for (int k = 1; k <= 4000; ++k) {
            const Vec3 cur = thrust::sample(traj, b.t_th_b + b.t_th_e * k / 4000.0).c;
            arc += (cur - prev).norm();
            prev = cur;
        }
        worst_arc = std::max(worst_arc, std::abs(arc - a.d));
    }
    h.require(worst_junction <= 0.0, "junction continuity <= 1e-9");
    h.require(worst_exit <= 1e-12, "exit speed equals k * |cdot_lo_b| (err " +
                                       std::to_string(worst_exit) + ")");
    h.require(worst_arc <= 1e-9, "UARM arc length equals d (err " + std::to_string(worst_arc) +
                                     ")");

    // 3 m/s lift-off: the split parametrization keeps the minimum height
    // while the single cubic with the same thrust time dives below it.
    thrust::JumpAction uarm;
    uarm.t_th_b = 0.6;
    uarm.r_p = 0.37;
    uarm.theta_p = 1.309;
    uarm.r_v = 1.2;
    uarm.theta_v = kPi / 4;
    uarm.k = 2.5;
    uarm.d = 0.3;
    uarm.phi_lo = Vec3::Zero();
    uarm.phidot_lo = Vec3::Zero();
    const auto b_uarm = thrust::decode(uarm, c0, Vec3::Zero(), Vec3(1.0, 0, c0.z()));
    thrust::JumpAction pure = uarm;
    pure.t_th_b = b_uarm.t_th;  // same total thrust time
    pure.r_v = uarm.k * uarm.r_v;
    pure.k = 1.0;
    pure.d = 0.0;
    const auto b_pure = thrust::decode(pure, c0, Vec3::Zero(), Vec3(1.0, 0, c0.z()));
    const auto traj_uarm =
        thrust::build_trajectory(c0, Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), b_uarm);
    const auto traj_pure =
        thrust::build_trajectory(c0, Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), b_pure);
    h.require(std::abs(b_pure.cdot_lo_e.norm() - 3.0) <= 1e-12 &&
                  std::abs(b_uarm.cdot_lo_e.norm() - 3.0) <= 1e-12,
              "both parametrizations exit at 3 m/s");
    const double min_uarm = thrust::min_sampled_height(traj_uarm, 2000);
    const double min_pure = thrust::min_sampled_height(traj_pure, 2000);
    h.require(min_uarm >= 0.15, "Bezier+UARM keeps min height >= 0.15 m (got " +
                                    std::to_string(min_uarm) + ")");
    h.require(min_pure < 0.15, "pure Bezier violates the 0.15 m floor (got " +
                                   std::to_string(min_pure) + ")");
}

// ---------------------------------------------------------------- criterion 6
void criterion_statics(Harness& h) {
    const auto model = quadruped::QuadrupedModel::go1_defaults();
    quadruped::StanceState stance;
    stance.pose = {Vec3(0, 0, model.stance_height()), Vec3::Zero()};
    stance.foot_world = model.default_stance_feet(stance.pose.position);
    stance.q = quadruped::whole_body_ik(model, stance.pose, stance.foot_world);
    const auto comp = quadruped::gravity_ff(stance, model);

    Vec6 wrench = Vec6::Zero();
    double grf_z = 0.0;
    for (int leg = 0; leg < 4; ++leg) {
        wrench.head<3>() += comp.forces[leg];
        wrench.tail<3>() +=
            (stance.foot_world[leg] - stance.pose.position).cross(comp.forces[leg]);
        grf_z += comp.forces[leg].z();
    }
    wrench[2] -= model.mass * kGravity;
    h.require(wrench.norm() <= 1e-8,
              "net wrench at equilibrium <= 1e-8 (got " + std::to_string(wrench.norm()) + ")");
    h.require(std::abs(grf_z - model.mass * kGravity) <= 1e-6,
              "sum of vertical GRF equals m*g within 1e-6");

    // The equilibrium is a fixed point of the tracked stance dynamics.
    sim::EpisodeConfig cfg;
    cfg.mode = sim::Mode::kTracked;
    sim::Episode ep(model, {Vec3::Zero(), Vec3::Zero()},
                    (Vec13() << 0.5, 0.32, kPi / 2, 2.0, kPi / 2, 1.0, 0.0, 0, 0, 0, 0, 0, 0)
                        .finished(),
                    cfg);
    const Vec3 before = ep.pose().position;
    for (int k = 0; k < 100; ++k) ep.hold_step();
    h.require((ep.pose().position - before).norm() <= 1e-9 &&
                  ep.twist().linear.norm() <= 1e-9,
              "stance state is a fixed point of the contact dynamics");
}

// ---------------------------------------------------------------- criterion 7
void criterion_kinematics(Harness& h) {
    const auto model = quadruped::QuadrupedModel::go1_defaults();
    Rng rng(1007);
    double worst_rt = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
        const int leg = static_cast<int>(rng.next_u64() % 4);
        Vec3 q;
        for (;;) {
            q = Vec3(rng.uniform(-0.7, 0.7), rng.uniform(-1.6, 0.4), rng.uniform(0.3, 2.3));
            const double depth = model.thigh * std::cos(q[1]) +
                                 model.shank * std::cos(q[1] + q[2]);
            if (depth > 0.02) break;
        }
        const Vec3 foot = quadruped::leg_fk(model, q, leg);
        const Vec3 q_back = quadruped::leg_ik(model, foot, leg);
        worst_rt = std::max(worst_rt, (quadruped::leg_fk(model, q_back, leg) - foot).norm());
    }
    h.require(worst_rt <= 1e-10,
              "FK/IK round trip <= 1e-10 m over 10^4 points (got " + std::to_string(worst_rt) +
                  ")");

    double worst_fd = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int leg = static_cast<int>(rng.next_u64() % 4);
        const Vec3 q(rng.uniform(-0.8, 0.8), rng.uniform(-1.8, 0.8), rng.uniform(0.2, 2.5));
        const Mat3 jac = quadruped::leg_jacobian(model, q, leg);
        const double step = 1e-6;
        for (int col = 0; col < 3; ++col) {
            Vec3 qp = q, qm = q;
            qp[col] += step;
            qm[col] -= step;
            const Vec3 fd =
                (quadruped::leg_fk(model, qp, leg) - quadruped::leg_fk(model, qm, leg)) /
                (2 * step);
            worst_fd = std::max(worst_fd,
                                (jac.col(col) - fd).norm() / std::max(1.0, fd.norm()));
        }
    }
    h.require(worst_fd <= 1e-6,
              "Jacobian vs finite differences rel err <= 1e-6 (got " + std::to_string(worst_fd) +
                  ")");
}

// ---------------------------------------------------------------- criterion 8
void criterion_reward(Harness& h) {
    const reward::RewardParams params;
    bool monotone_err = true, monotone_dist = true, bounded = true;
    for (int i = 0; i < 100; ++i) {
        const double dist = 0.01 + 1.5 * i / 99.0;
        const Vec3 tg(dist, 0, 0);
        double prev = std::numeric_limits<double>::infinity();
        for (int j = 0; j < 100; ++j) {
            const double err = 1.0 * j / 99.0;
            const double r = reward::landing_reward(tg - Vec3(err, 0, 0), Vec3::Zero(), tg,
                                                    params);
            if (r >= prev) monotone_err = false;
            prev = r;
        }
    }
    for (int j = 0; j < 100; ++j) {
        const double err = 1.0 * j / 99.0;
        double prev = -1.0;
        for (int i = 0; i < 100; ++i) {
            const double dist = 0.01 + 1.5 * i / 99.0;
            const Vec3 tg(dist, 0, 0);
            const double r = reward::landing_reward(tg - Vec3(err, 0, 0), Vec3::Zero(), tg,
                                                    params);
            if (r <= prev) monotone_dist = false;
            prev = r;
        }
    }
    Rng rng(1008);
    for (int trial = 0; trial < 10000; ++trial) {
        const double r_lt = rng.uniform(0, 4);
        std::map<std::string, double> pens{{"friction", rng.uniform(0, 3)},
                                           {"joint_torque", rng.uniform(0, 3)}};
        const double r = reward::total_reward(r_lt, pens, params);
        if (r < 0.0 || r > r_lt + 1e-15) bounded = false;
    }
    h.require(monotone_err, "landing reward strictly decreasing in the error");
    h.require(monotone_dist, "landing reward strictly increasing in the distance");
    h.require(bounded, "0 <= R <= R_lt everywhere sampled");
}

// ---------------------------------------------------------------- criterion 9
learner::TrainConfig smoke_config() {
    learner::TrainConfig cfg;
    cfg.net.hidden = {64, 32};
    cfg.n_envs = 8;
    cfg.iterations = 50;
    cfg.seed = 12;
    cfg.checkpoint_every = 25;
    cfg.n_threads = 2;
    return cfg;
}

reward::RewardParams training_reward() {
    return reward::RewardParams::from_config(
        Config::parse_file(std::string(QJ_CONFIG_DIR) + "/training.reward"));
}

learner::EnvFactory jump_factory(const learner::CommandRegion& region,
                                 sim::Mode mode = sim::Mode::kIdeal) {
    const auto model = quadruped::QuadrupedModel::go1_defaults();
    const auto rew = training_reward();
    sim::EpisodeConfig episode;
    episode.mode = mode;
    return [model, rew, episode, region]() {
        return std::make_unique<learner::JumpEnv>(model, rew, episode, region);
    };
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

void criterion_determinism(Harness& h) {
    const double t0 = now_seconds();
    const auto factory = jump_factory(learner::CommandRegion::forward_flat());
    const std::string d1 = "qj_acc_det_a", d2 = "qj_acc_det_b";
    fs::remove_all(d1);
    fs::remove_all(d2);
    const auto r1 = learner::train(smoke_config(), factory, d1);
    const auto r2 = learner::train(smoke_config(), factory, d2);
    h.require(slurp(r1.metrics_path) == slurp(r2.metrics_path),
              "train metrics byte-identical across equal-seed runs");

    eval::EvalContext ctx;
    ctx.model = quadruped::QuadrupedModel::go1_defaults();
    ctx.reward = reward::RewardParams::defaults();
    ctx.n_threads = 2;
    eval::SweepSpec spec;
    spec.samples = 64;
    spec.seed = 5;
    const auto policy1 = learner::GaussianPolicy::load(r1.checkpoint_path);
    const auto policy2 = learner::GaussianPolicy::load(r2.checkpoint_path);
    eval::write_region_csv(d1 + "/region.csv", eval::feasible_region(policy1, spec, ctx));
    eval::write_region_csv(d2 + "/region.csv", eval::feasible_region(policy2, spec, ctx));
    h.require(slurp(d1 + "/region.csv") == slurp(d2 + "/region.csv"),
              "sweep CSV byte-identical across equal-seed runs");
    const double elapsed = now_seconds() - t0;
    h.require(elapsed < 300.0, "runtime < 5 min (got " + std::to_string(elapsed) + " s)");
    fs::remove_all(d1);
    fs::remove_all(d2);
}

// --------------------------------------------------------- criteria 10 and 11
struct ForwardTraining {
    std::string dir = "qj_acc_forward";
    std::string checkpoint;
    std::string metrics;
    double mean_error = -1.0;
    long iterations = 0;
    bool trained = false;
};

double forward_mean_error(const learner::GaussianPolicy& policy) {
    // Targets within a 0.5 m radius inside the forward region.
    eval::EvalContext ctx;
    ctx.model = quadruped::QuadrupedModel::go1_defaults();
    ctx.reward = reward::RewardParams::defaults();
    ctx.n_threads = 2;
    Rng rng(42);
    double total = 0.0;
    int count = 0;
    while (count < 200) {
        const double x = rng.uniform(0.0, 0.5);
        const double y = rng.uniform(-0.3, 0.3);
        if (std::hypot(x, y) > 0.5) continue;
        thrust::JumpCommand cmd{Vec3(x, y, 0.0), Vec3::Zero()};
        const auto out = eval::eval_episode(policy, cmd, ctx);
        total += (out.target_c.head<2>() - out.final_c.head<2>()).norm();
        ++count;
    }
    return total / count;
}

ForwardTraining& forward_training() {
    static ForwardTraining state;
    if (state.trained) return state;
    state.trained = true;

    learner::TrainConfig cfg = learner::TrainConfig::from_config(
        Config::parse_file(std::string(QJ_CONFIG_DIR) + "/forward.train"));
    cfg.n_threads = 0;  // use all cores
    const auto factory = jump_factory(learner::CommandRegion::forward_flat());
    fs::remove_all(state.dir);
    const auto result = learner::train(cfg, factory, state.dir);
    state.checkpoint = result.checkpoint_path;
    state.metrics = result.metrics_path;
    state.iterations = result.completed_iterations;
    const auto policy = learner::GaussianPolicy::load(result.checkpoint_path);
    state.mean_error = forward_mean_error(policy);
    std::printf("    [forward training] iter=%ld mean landing error=%.4f m\n", state.iterations,
                state.mean_error);
    std::fflush(stdout);
    return state;
}

void criterion_learning(Harness& h) {
    const double t0 = now_seconds();
    auto& state = forward_training();
    const double elapsed = now_seconds() - t0;
    std::printf("    [forward training] wall time %.1f s on %u threads\n", elapsed,
                std::thread::hardware_concurrency());
    h.require(state.iterations <= 2000, "trained within 2000 iterations");
    h.require(state.mean_error >= 0.0 && state.mean_error <= 0.10,
              "mean landing error <= 0.10 m inside the 0.5 m radius (got " +
                  std::to_string(state.mean_error) + ")");
}

void criterion_penalty_convergence(Harness& h) {
    auto& state = forward_training();
    std::ifstream in(state.metrics);
    h.require(static_cast<bool>(in), "metrics log present");
    if (!in) return;
    std::string line;
    std::getline(in, line);  // header
    std::vector<double> penalties;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        // iteration,mean_reward,mean_total_penalty,...
        size_t p1 = line.find(',');
        size_t p2 = line.find(',', p1 + 1);
        size_t p3 = line.find(',', p2 + 1);
        penalties.push_back(std::stod(line.substr(p2 + 1, p3 - p2 - 1)));
    }
    h.require(penalties.size() >= 260, "at least 260 iterations of history");
    if (penalties.size() < 260) return;
    auto median = [](std::vector<double> xs) {
        std::sort(xs.begin(), xs.end());
        return xs[xs.size() / 2];
    };
    const std::vector<double> first(penalties.begin(), penalties.begin() + 10);
    const std::vector<double> later(penalties.begin() + 250, penalties.end());
    const double early = median(first);
    const double late = median(later);
    std::printf("    [penalties] median first 10 = %.4f, median after 250 = %.4f\n", early,
                late);
    h.require(late <= 0.10 * early, "median penalty after 250 iterations <= 10% of the start");
}

// --------------------------------------------------------- criteria 12 and 13
struct OmniTraining {
    std::string dir = "qj_acc_omni";
    std::string checkpoint;
    bool trained = false;
};

OmniTraining& omni_training() {
    static OmniTraining state;
    if (state.trained) return state;
    state.trained = true;
    learner::TrainConfig cfg = learner::TrainConfig::from_config(
        Config::parse_file(std::string(QJ_CONFIG_DIR) + "/omni.train"));
    cfg.n_threads = 0;
    const auto factory = jump_factory(learner::CommandRegion::omnidirectional());
    fs::remove_all(state.dir);
    const auto result = learner::train(cfg, factory, state.dir);
    state.checkpoint = result.checkpoint_path;
    return state;
}

void criterion_yaw(Harness& h) {
    auto& state = omni_training();
    const auto policy = learner::GaussianPolicy::load(state.checkpoint);
    eval::EvalContext ctx;
    ctx.model = quadruped::QuadrupedModel::go1_defaults();
    ctx.reward = reward::RewardParams::defaults();
    ctx.n_threads = 2;
    double worst_ratio = 0.0;
    for (double cmd_deg : {-45.0, -35.0, -25.0, -15.0, 15.0, 25.0, 35.0, 45.0}) {
        thrust::JumpCommand cmd{Vec3::Zero(), Vec3(0, 0, deg2rad(cmd_deg))};
        const auto out = eval::eval_episode(policy, cmd, ctx);
        const double err_deg =
            std::abs(rad2deg(wrap_angle(out.final_phi.z() - out.target_phi.z())));
        worst_ratio = std::max(worst_ratio, err_deg / std::abs(cmd_deg));
        std::printf("    [yaw] cmd=%+.1f deg err=%.2f deg\n", cmd_deg, err_deg);
    }
    h.require(worst_ratio <= 0.10,
              "in-place yaw error <= 10% of command up to 45 deg (got " +
                  std::to_string(100.0 * worst_ratio) + "%)");
}

void criterion_robustness(Harness& h) {
    auto& state = omni_training();
    const auto policy = learner::GaussianPolicy::load(state.checkpoint);
    eval::EvalContext ctx;
    ctx.model = quadruped::QuadrupedModel::go1_defaults();
    ctx.reward = reward::RewardParams::defaults();
    ctx.episode.mode = sim::Mode::kTracked;
    ctx.n_threads = 2;
    eval::SweepSpec spec;
    spec.seed = 21;
    const auto rows = eval::robustness_study(policy, 100, 0.5, 2.0, spec, ctx);
    const std::string dir = "qj_acc_robust";
    fs::create_directories(dir);
    eval::write_robust_csv(dir + "/robustness.csv", rows);
    h.require(rows.size() == 6, "full NOM/DV/MV x FWD/DIAG matrix executed");
    double nom_std = -1.0, dv_std = -1.0;
    for (const auto& r : rows) {
        std::printf("    [robust] %s %s ex=%.3f+-%.3f ey=%.3f+-%.3f epsi=%.2f+-%.2f\n",
                    r.jump_type.c_str(), r.test.c_str(), r.ex_mean, r.ex_std, r.ey_mean,
                    r.ey_std, r.epsi_mean, r.epsi_std);
        if (r.jump_type == "FWD" && r.test == "NOM") nom_std = r.ex_std;
        if (r.jump_type == "FWD" && r.test == "DV") dv_std = r.ex_std;
    }
    h.require(nom_std >= 0.0 && dv_std >= 0.0 && nom_std <= dv_std,
              "NOM e_x std <= DV e_x std");
}

}  // namespace

int main() {
    struct Entry {
        int id;
        const char* name;
        Criterion fn;
    };
    const std::vector<Entry> criteria = {
        {1, "Bezier explicit/generic agreement and derivative check", criterion_bezier},
        {2, "Boundary-condition reproduction", criterion_boundary},
        {3, "Ballistics closed form vs RK4 and hyperbolic round trip", criterion_ballistics},
        {4, "Safety filter vs integrated brute force", criterion_filter},
        {5, "UARM junction, exit speed, arc length, floor clearance", criterion_uarm},
        {6, "Static equilibrium wrench and GRF balance", criterion_statics},
        {7, "IK/FK round trip and Jacobian check", criterion_kinematics},
        {8, "Reward monotonicity and bounds", criterion_reward},
        {9, "Seeded determinism of train + eval", criterion_determinism},
        {10, "Forward-policy learning accuracy", criterion_learning},
        {11, "Penalty convergence", criterion_penalty_convergence},
        {12, "Omnidirectional yaw accuracy", criterion_yaw},
        {13, "Robustness protocol", criterion_robustness},
    };

    int failures = 0;
    for (const auto& entry : criteria) {
        Harness h;
        try {
            entry.fn(h);
        } catch (const std::exception& e) {
            h.require(false, std::string("exception: ") + e.what());
        }
        std::printf("[%s] criterion %2d: %s\n", h.failures == 0 ? "PASS" : "FAIL", entry.id,
                    entry.name);
        if (h.failures) std::fputs(h.detail.str().c_str(), stdout);
        std::fflush(stdout);
        failures += h.failures == 0 ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
                criteria.size());
    return failures;
}
