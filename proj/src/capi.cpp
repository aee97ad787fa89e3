#include "quadjump.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qj/csv.hpp"
#include "qj/evalsuite.hpp"
#include "qj/learner.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct qj_robot {
    qj::quadruped::QuadrupedModel model;
    qj::Config cfg;  // retained for [sim] overrides
    std::string source;
    uint64_t hash = 0;
};

struct qj_reward {
    qj::reward::RewardParams params;
    std::string source;
    uint64_t hash = 0;
};

struct qj_policy {
    qj::learner::GaussianPolicy policy;
    std::string source;
    uint64_t hash = 0;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

template <typename Fn>
qj_status guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const std::exception& e) {
        set_error(e.what());
        return QJ_ERROR;
    } catch (...) {
        set_error("unknown error");
        return QJ_ERROR;
    }
}

uint64_t fnv1a(const std::string& bytes) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

uint64_t hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return fnv1a(ss.str());
}

std::string hex(uint64_t h) {
    char buf[19];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

qj::Vec3 vec3(const double* p) { return qj::Vec3(p[0], p[1], p[2]); }

qj::Vec13 vec13(const double* p) {
    qj::Vec13 v;
    for (int i = 0; i < 13; ++i) v[i] = p[i];
    return v;
}

// [sim] section: episode-engine knobs that live beside the robot parameters.
qj::sim::EpisodeConfig episode_config(const qj::Config& cfg, qj::sim::EpisodeConfig base = {}) {
    const std::string sec = "sim";
    base.dt = cfg.get_num(sec, "dt", base.dt);
    base.timeout = cfg.get_num(sec, "timeout", base.timeout);
    base.friction_mu = cfg.get_num(sec, "friction_mu", base.friction_mu);
    base.path_check_dt = cfg.get_num(sec, "path_check_dt", base.path_check_dt);
    base.floor_clearance = cfg.get_num(sec, "floor_clearance", base.floor_clearance);
    base.uarm_literal_lerp = cfg.get_int(sec, "uarm_literal_lerp", base.uarm_literal_lerp) != 0;
    if (cfg.has(sec, "q_retract")) {
        const auto v = cfg.get_vec(sec, "q_retract");
        if (v.size() != 3) throw qj::ConfigError("q_retract: expected 3 numbers");
        base.q_retract = qj::Vec3(v[0], v[1], v[2]);
    }
    return base;
}

ordered_json outcome_to_json(const qj::sim::EpisodeOutcome& out,
                             const qj::reward::RewardParams& params) {
    ordered_json j;
    j["failure"] = qj::sim::to_string(out.failure);
    j["start_c"] = {out.start_c.x(), out.start_c.y(), out.start_c.z()};
    j["target_c"] = {out.target_c.x(), out.target_c.y(), out.target_c.z()};
    j["target_phi"] = {out.target_phi.x(), out.target_phi.y(), out.target_phi.z()};
    j["liftoff"] = {
        {"time", out.liftoff_time},
        {"c", {out.liftoff_c.x(), out.liftoff_c.y(), out.liftoff_c.z()}},
        {"cdot", {out.liftoff_cdot.x(), out.liftoff_cdot.y(), out.liftoff_cdot.z()}},
        {"phi", {out.liftoff_phi.x(), out.liftoff_phi.y(), out.liftoff_phi.z()}},
        {"phidot", {out.liftoff_phidot.x(), out.liftoff_phidot.y(), out.liftoff_phidot.z()}}};
    if (out.touchdown) {
        j["touchdown"] = {
            {"time", out.touchdown->time},
            {"com", {out.touchdown->com.x(), out.touchdown->com.y(), out.touchdown->com.z()}},
            {"euler_rates",
             {out.touchdown->euler_rates.x(), out.touchdown->euler_rates.y(),
              out.touchdown->euler_rates.z()}}};
    }
    j["final_c"] = {out.final_c.x(), out.final_c.y(), out.final_c.z()};
    j["final_phi"] = {out.final_phi.x(), out.final_phi.y(), out.final_phi.z()};
    j["bounce_count"] = out.bounce_count;
    ordered_json pen;
    for (const auto& key : qj::sim::penalty_keys()) {
        const auto it = out.penalties.find(key);
        pen[key] = it == out.penalties.end() ? 0.0 : it->second;
    }
    j["penalties"] = pen;
    j["landing_error"] = (out.target_c - out.final_c).norm();
    j["reward"] = qj::reward::episode_reward(out, params);
    if (out.prediction) {
        j["prediction"] = {
            {"c_td",
             {out.prediction->c_td.x(), out.prediction->c_td.y(), out.prediction->c_td.z()}},
            {"flight_time", out.prediction->flight_time},
            {"apex_z", out.prediction->apex_z},
            {"time_to_apex", out.prediction->time_to_apex}};
    }
    return j;
}

}  // namespace

extern "C" {

const char* qj_version(void) { return "1.0.0"; }

const char* qj_last_error(void) { return g_last_error.c_str(); }

qj_robot* qj_robot_default(void) {
    auto* r = new qj_robot;
    r->model = qj::quadruped::QuadrupedModel::go1_defaults();
    r->source = "<defaults>";
    r->hash = fnv1a(r->source);
    return r;
}

qj_robot* qj_robot_load(const char* path) {
    try {
        auto* r = new qj_robot;
        r->cfg = qj::Config::parse_file(path);
        r->model = qj::quadruped::QuadrupedModel::from_config(r->cfg);
        r->source = path;
        r->hash = hash_file(path);
        return r;
    } catch (const std::exception& e) {
        set_error(e.what());
        return nullptr;
    }
}

void qj_robot_free(qj_robot* robot) { delete robot; }

qj_reward* qj_reward_default(void) {
    auto* r = new qj_reward;
    r->params = qj::reward::RewardParams::defaults();
    r->source = "<defaults>";
    r->hash = fnv1a(r->source);
    return r;
}

qj_reward* qj_reward_load(const char* path) {
    try {
        auto* r = new qj_reward;
        r->params = qj::reward::RewardParams::from_config(qj::Config::parse_file(path));
        r->source = path;
        r->hash = hash_file(path);
        return r;
    } catch (const std::exception& e) {
        set_error(e.what());
        return nullptr;
    }
}

void qj_reward_free(qj_reward* reward) { delete reward; }

qj_policy* qj_policy_load(const char* path) {
    try {
        auto* p = new qj_policy;
        p->policy = qj::learner::GaussianPolicy::load(path);
        p->source = path;
        p->hash = hash_file(path);
        return p;
    } catch (const std::exception& e) {
        set_error(e.what());
        return nullptr;
    }
}

void qj_policy_free(qj_policy* policy) { delete policy; }

qj_status qj_policy_act(const qj_policy* policy, const double state[6], double action_out[13]) {
    return guarded([&]() {
        if (!policy || !state || !action_out) {
            set_error("qj_policy_act: null argument");
            return QJ_ERROR;
        }
        qj::Vec6 s;
        for (int i = 0; i < 6; ++i) s[i] = state[i];
        const qj::Vec13 a = qj::eval::policy_action(policy->policy, s);
        for (int i = 0; i < 13; ++i) action_out[i] = a[i];
        return QJ_OK;
    });
}

qj_status qj_predict_landing(const double c_lo[3], const double cdot_lo[3], double z_target,
                             double c_td_out[3], double* flight_time_out, double* apex_z_out) {
    return guarded([&]() {
        if (!c_lo || !cdot_lo) {
            set_error("qj_predict_landing: null argument");
            return QJ_ERROR;
        }
        const qj::ballistics::BallisticState state{vec3(c_lo), vec3(cdot_lo)};
        try {
            const auto pred = qj::ballistics::predict_landing(state, z_target);
            if (c_td_out)
                for (int i = 0; i < 3; ++i) c_td_out[i] = pred.c_td[i];
            if (flight_time_out) *flight_time_out = pred.flight_time;
            if (apex_z_out) *apex_z_out = pred.apex_z;
            return QJ_OK;
        } catch (const qj::ballistics::UnreachableError& e) {
            set_error(e.what());
            if (apex_z_out) *apex_z_out = qj::ballistics::apex(state).apex_z;
            return QJ_REJECTED;
        }
    });
}

qj_status qj_check(const qj_robot* robot, const double target[6], const double action[13],
                   char* reason_out, double landing_out[3], char** report_json) {
    return guarded([&]() {
        if (!robot || !target || !action) {
            set_error("qj_check: null argument");
            return QJ_ERROR;
        }
        const qj::Vec3 c0(0.0, 0.0, robot->model.stance_height());
        const qj::Vec3 c_tg = c0 + vec3(target);
        const auto clip = qj::thrust::clip_action(vec13(action));
        const auto boundary = qj::thrust::decode(clip.action, c0, qj::Vec3::Zero(), c_tg);
        const auto filter =
            qj::ballistics::safety_filter({boundary.c_lo_e, boundary.cdot_lo_e}, c_tg);

        if (reason_out) {
            std::strncpy(reason_out, filter.accepted ? "accepted" : filter.reason.c_str(), 63);
            reason_out[63] = '\0';
        }
        if (filter.accepted && landing_out)
            for (int i = 0; i < 3; ++i) landing_out[i] = filter.prediction->c_td[i];
        if (report_json) {
            ordered_json j;
            j["accepted"] = filter.accepted;
            if (!filter.accepted) j["reason"] = filter.reason;
            j["target_c"] = {c_tg.x(), c_tg.y(), c_tg.z()};
            j["liftoff_c"] = {boundary.c_lo_e.x(), boundary.c_lo_e.y(), boundary.c_lo_e.z()};
            j["liftoff_cdot"] = {boundary.cdot_lo_e.x(), boundary.cdot_lo_e.y(),
                                 boundary.cdot_lo_e.z()};
            const auto apex = qj::ballistics::apex({boundary.c_lo_e, boundary.cdot_lo_e});
            j["apex_z"] = apex.apex_z;
            if (filter.prediction) {
                j["predicted_landing"] = {filter.prediction->c_td.x(),
                                          filter.prediction->c_td.y(),
                                          filter.prediction->c_td.z()};
                j["flight_time"] = filter.prediction->flight_time;
            }
            j["clip_excess"] = clip.excess.sum();
            *report_json = dup_string(j.dump(2));
        }
        if (!filter.accepted) {
            set_error(filter.reason);
            return QJ_REJECTED;
        }
        return QJ_OK;
    });
}

qj_status qj_plan(const qj_robot* robot, const double target[6], const double action[13],
                  double sample_period, const char* trajectory_csv, char** summary_json) {
    return guarded([&]() {
        if (!robot || !target || !action) {
            set_error("qj_plan: null argument");
            return QJ_ERROR;
        }
        const qj::Vec3 c0(0.0, 0.0, robot->model.stance_height());
        const qj::Vec3 c_tg = c0 + vec3(target);
        const auto clip = qj::thrust::clip_action(vec13(action));
        const auto boundary = qj::thrust::decode(clip.action, c0, qj::Vec3::Zero(), c_tg);
        const auto filter =
            qj::ballistics::safety_filter({boundary.c_lo_e, boundary.cdot_lo_e}, c_tg);
        if (!filter.accepted) {
            if (summary_json) {
                ordered_json j;
                j["accepted"] = false;
                j["reason"] = filter.reason;
                *summary_json = dup_string(j.dump(2));
            }
            set_error(filter.reason);
            return QJ_REJECTED;
        }
        const auto traj = qj::thrust::build_trajectory(c0, qj::Vec3::Zero(), qj::Vec3::Zero(),
                                                       qj::Vec3::Zero(), boundary);
        const auto cfg = episode_config(robot->cfg);
        const double min_z = qj::thrust::min_sampled_height(traj);
        if (trajectory_csv && sample_period > 0.0)
            qj::thrust::export_csv(traj, trajectory_csv, sample_period);
        if (summary_json) {
            ordered_json j;
            j["accepted"] = true;
            j["t_th_b"] = boundary.t_th_b;
            j["t_th_e"] = boundary.t_th_e;
            j["t_th"] = boundary.t_th;
            j["uarm_accel"] = boundary.accel;
            j["liftoff_c"] = {boundary.c_lo_e.x(), boundary.c_lo_e.y(), boundary.c_lo_e.z()};
            j["liftoff_cdot"] = {boundary.cdot_lo_e.x(), boundary.cdot_lo_e.y(),
                                 boundary.cdot_lo_e.z()};
            j["predicted_landing"] = {filter.prediction->c_td.x(), filter.prediction->c_td.y(),
                                      filter.prediction->c_td.z()};
            j["target_c"] = {c_tg.x(), c_tg.y(), c_tg.z()};
            j["flight_time"] = filter.prediction->flight_time;
            j["apex_z"] = filter.prediction->apex_z;
            j["min_height"] = min_z;
            j["floor_clearance"] = cfg.floor_clearance;
            j["clearance_ok"] = min_z >= cfg.floor_clearance;
            j["clip_excess"] = clip.excess.sum();
            j["robot_config"] = robot->source;
            j["robot_config_hash"] = hex(robot->hash);
            *summary_json = dup_string(j.dump(2));
        }
        return QJ_OK;
    });
}

qj_status qj_simulate(const qj_robot* robot, const qj_reward* reward, const double command[6],
                      const double action[13], const char* mode, uint64_t seed,
                      const char* trace_csv, char** outcome_json) {
    return guarded([&]() {
        if (!robot || !reward || !command || !action) {
            set_error("qj_simulate: null argument");
            return QJ_ERROR;
        }
        qj::sim::EpisodeConfig cfg = episode_config(robot->cfg);
        cfg.mode = qj::sim::mode_from_string(mode ? mode : "ideal");
        cfg.seed = seed;
        qj::thrust::JumpCommand cmd;
        cmd.delta_c = vec3(command);
        cmd.delta_phi = vec3(command + 3);
        std::vector<qj::sim::TraceRow> trace;
        const auto outcome = qj::sim::run_episode(robot->model, cmd, vec13(action), cfg,
                                                  trace_csv ? &trace : nullptr);
        if (trace_csv) qj::sim::write_trace_csv(trace, trace_csv);
        if (outcome_json) {
            ordered_json j = outcome_to_json(outcome, reward->params);
            j["mode"] = qj::sim::to_string(cfg.mode);
            j["seed"] = seed;
            j["robot_config_hash"] = hex(robot->hash);
            j["reward_config_hash"] = hex(reward->hash);
            *outcome_json = dup_string(j.dump(2));
        }
        return QJ_OK;
    });
}

qj_status qj_train(const qj_robot* robot, const qj_reward* reward, const char* train_cfg_path,
                   const char* mode, uint64_t seed, int seed_set, int n_envs_override,
                   int iterations_override, const char* out_dir) {
    return guarded([&]() {
        if (!robot || !reward || !train_cfg_path || !out_dir) {
            set_error("qj_train: null argument");
            return QJ_ERROR;
        }
        const qj::Config cfg = qj::Config::parse_file(train_cfg_path);
        qj::learner::TrainConfig train_cfg = qj::learner::TrainConfig::from_config(cfg);
        if (seed_set) train_cfg.seed = seed;
        if (n_envs_override > 0) train_cfg.n_envs = n_envs_override;
        if (iterations_override > 0) train_cfg.iterations = iterations_override;
        const auto region = qj::learner::CommandRegion::from_config(cfg);

        qj::sim::EpisodeConfig episode = episode_config(robot->cfg);
        episode = episode_config(cfg, episode);  // train file may override [sim]
        episode.mode = qj::sim::mode_from_string(mode && *mode ? mode
                                                               : cfg.get_str("sim", "mode",
                                                                             "ideal"));

        const auto model = robot->model;
        const auto rew = reward->params;
        qj::learner::EnvFactory factory = [model, rew, episode, region]() {
            return std::make_unique<qj::learner::JumpEnv>(model, rew, episode, region);
        };
        const auto result = qj::learner::train(train_cfg, factory, out_dir);

        ordered_json meta;
        meta["seed"] = train_cfg.seed;
        meta["mode"] = qj::sim::to_string(episode.mode);
        meta["n_envs"] = train_cfg.n_envs;
        meta["iterations"] = result.completed_iterations;
        meta["diverged"] = result.diverged;
        meta["train_config"] = train_cfg_path;
        meta["train_config_hash"] = hex(hash_file(train_cfg_path));
        meta["robot_config_hash"] = hex(robot->hash);
        meta["reward_config_hash"] = hex(reward->hash);
        meta["checkpoint"] = result.checkpoint_path;
        std::ofstream metaout(fs::path(out_dir) / "run_metadata.json");
        metaout << meta.dump(2) << '\n';

        if (result.diverged) {
            set_error("training diverged; last good checkpoint kept");
            return QJ_DIVERGED;
        }
        return QJ_OK;
    });
}

qj_status qj_eval(const qj_robot* robot, const qj_reward* reward, const char* checkpoint_path,
                  const char* suite, const char* mode, uint64_t seed, int samples,
                  double threshold, double perturb_p, double d_max, const char* out_dir) {
    return guarded([&]() {
        if (!robot || !reward || !checkpoint_path || !suite || !out_dir) {
            set_error("qj_eval: null argument");
            return QJ_ERROR;
        }
        const std::string name = suite;
        const bool is_robust = name == "robust";
        if (name != "region" && name != "avt" && name != "height" && name != "yaw" &&
            !is_robust) {
            set_error("unknown suite: " + name + " (expected region|avt|height|yaw|robust)");
            return QJ_ERROR;
        }
        const auto policy = qj::learner::GaussianPolicy::load(checkpoint_path);

        qj::eval::EvalContext ctx;
        ctx.model = robot->model;
        ctx.reward = reward->params;
        ctx.episode = episode_config(robot->cfg);
        ctx.episode.mode = mode && *mode
                               ? qj::sim::mode_from_string(mode)
                               : (is_robust ? qj::sim::Mode::kTracked : qj::sim::Mode::kIdeal);
        qj::eval::SweepSpec spec;
        spec.seed = seed;
        if (samples > 0) spec.samples = samples;
        if (threshold > 0) spec.threshold = threshold;

        fs::create_directories(out_dir);
        const fs::path dir(out_dir);
        std::vector<std::string> outputs;
        if (name == "region") {
            const auto rows = qj::eval::feasible_region(policy, spec, ctx);
            qj::eval::write_region_csv((dir / "feasible_region.csv").string(), rows);
            outputs.push_back("feasible_region.csv");
        } else if (name == "avt") {
            qj::eval::write_avt_csv((dir / "actual_vs_target_forward.csv").string(),
                                    qj::eval::actual_vs_target(policy, false, spec, ctx));
            qj::eval::write_avt_csv((dir / "actual_vs_target_backward.csv").string(),
                                    qj::eval::actual_vs_target(policy, true, spec, ctx));
            outputs = {"actual_vs_target_forward.csv", "actual_vs_target_backward.csv"};
        } else if (name == "height") {
            const auto maps = qj::eval::height_map(policy, spec, ctx);
            qj::eval::write_height_csv((dir / "height_map_up.csv").string(), maps.up, "max_up_z");
            qj::eval::write_height_csv((dir / "height_map_down.csv").string(), maps.down,
                                       "min_down_z");
            outputs = {"height_map_up.csv", "height_map_down.csv"};
        } else if (name == "yaw") {
            qj::eval::write_yaw_csv((dir / "yaw_sweep.csv").string(),
                                    qj::eval::yaw_sweep(policy, spec, ctx));
            outputs = {"yaw_sweep.csv"};
        } else {
            if (d_max < 0.0) {
                set_error("robust suite: d_max must be >= 0");
                return QJ_ERROR;
            }
            const int runs = samples > 0 ? samples : 100;
            const double p = perturb_p > 0 ? perturb_p : 0.5;
            const auto rows = qj::eval::robustness_study(policy, runs, p, d_max, spec, ctx);
            qj::eval::write_robust_csv((dir / "robustness.csv").string(), rows);
            outputs = {"robustness.csv"};
        }

        std::vector<std::pair<std::string, std::string>> meta;
        meta.emplace_back("suite", name);
        meta.emplace_back("seed", std::to_string(seed));
        meta.emplace_back("mode", qj::sim::to_string(ctx.episode.mode));
        meta.emplace_back("samples", std::to_string(spec.samples));
        meta.emplace_back("threshold", qj::CsvWriter::format(spec.threshold));
        meta.emplace_back("checkpoint", checkpoint_path);
        meta.emplace_back("checkpoint_id", hex(hash_file(checkpoint_path)));
        meta.emplace_back("robot_config_hash", hex(robot->hash));
        meta.emplace_back("reward_config_hash", hex(reward->hash));
        if (is_robust) {
            meta.emplace_back("perturb_p",
                              qj::CsvWriter::format(perturb_p > 0 ? perturb_p : 0.5));
            meta.emplace_back("d_max", qj::CsvWriter::format(d_max));
        }
        std::string files;
        for (const auto& f : outputs) files += (files.empty() ? "" : ",") + f;
        meta.emplace_back("outputs", files);
        qj::eval::write_metadata((dir / "metadata.json").string(), meta);
        return QJ_OK;
    });
}

void qj_string_free(char* s) { std::free(s); }

}  // extern "C"
