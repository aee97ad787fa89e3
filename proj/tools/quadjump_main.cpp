// quadjump command-line front end. Talks to the core exclusively through the
// C API in quadjump.h.
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "quadjump.h"

namespace {

struct RobotDeleter {
    void operator()(qj_robot* r) const { qj_robot_free(r); }
};
struct RewardDeleter {
    void operator()(qj_reward* r) const { qj_reward_free(r); }
};
struct PolicyDeleter {
    void operator()(qj_policy* p) const { qj_policy_free(p); }
};

using RobotPtr = std::unique_ptr<qj_robot, RobotDeleter>;
using RewardPtr = std::unique_ptr<qj_reward, RewardDeleter>;
using PolicyPtr = std::unique_ptr<qj_policy, PolicyDeleter>;

int fail(const std::string& msg, int code = 1) {
    std::cerr << "error: " << msg << "\n";
    return code;
}

int status_code(qj_status s) { return static_cast<int>(s); }

bool parse_numbers(const std::string& text, std::vector<double>& out) {
    std::string cleaned = text;
    for (char& c : cleaned)
        if (c == ',') c = ' ';
    std::istringstream in(cleaned);
    double v;
    while (in >> v) out.push_back(v);
    return in.eof();
}

// Pose argument: "dx,dy,dz" or "dx,dy,dz,droll,dpitch,dyaw".
bool parse_pose(const std::string& text, double pose[6]) {
    std::vector<double> v;
    if (!parse_numbers(text, v)) return false;
    if (v.size() != 3 && v.size() != 6) return false;
    for (int i = 0; i < 6; ++i) pose[i] = i < static_cast<int>(v.size()) ? v[i] : 0.0;
    return true;
}

// Action file: 13 whitespace/comma separated numbers, '#' comments.
bool load_action_file(const std::string& path, double action[13]) {
    std::ifstream in(path);
    if (!in) return false;
    std::vector<double> v;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        if (!parse_numbers(line, v)) return false;
    }
    if (v.size() != 13) return false;
    for (int i = 0; i < 13; ++i) action[i] = v[i];
    return true;
}

RobotPtr open_robot(const std::string& path) {
    return RobotPtr(path.empty() ? qj_robot_default() : qj_robot_load(path.c_str()));
}

RewardPtr open_reward(const std::string& path) {
    return RewardPtr(path.empty() ? qj_reward_default() : qj_reward_load(path.c_str()));
}

// Action source shared by plan/check/simulate: a file or a policy checkpoint
// queried with the displacement command.
int resolve_action(const std::string& action_path, const std::string& policy_path,
                   const double target[6], double action[13]) {
    if (!action_path.empty()) {
        if (!load_action_file(action_path, action))
            return fail("cannot read 13 action values from " + action_path);
        return 0;
    }
    if (policy_path.empty()) return fail("need --action FILE or --policy CHECKPOINT");
    PolicyPtr policy(qj_policy_load(policy_path.c_str()));
    if (!policy) return fail(qj_last_error());
    if (qj_policy_act(policy.get(), target, action) != QJ_OK) return fail(qj_last_error());
    return 0;
}

std::string join_path(const std::string& dir, const std::string& name) {
    if (dir.empty()) return name;
    return dir.back() == '/' ? dir + name : dir + "/" + name;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quadjump: guided-RL omnidirectional quadruped jumping toolkit"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string robot_path, reward_path, out_dir = ".";
    std::string mode;
    uint64_t seed = 0;
    bool seed_given = false;
    app.add_option("--robot", robot_path, "robot description file")->configurable(false);
    app.add_option("--reward", reward_path, "reward parameter file");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--mode", mode, "episode fidelity: ideal|tracked");
    auto* seed_opt = app.add_option("--seed", seed, "root random seed");

    // plan
    auto* plan = app.add_subcommand("plan", "compute a thrust reference and landing prediction");
    std::string plan_target, plan_action, plan_policy;
    double plan_dt = 0.002;
    plan->add_option("--target", plan_target, "displacement dx,dy,dz[,droll,dpitch,dyaw]")
        ->required();
    plan->add_option("--action", plan_action, "action file (13 values)");
    plan->add_option("--policy", plan_policy, "policy checkpoint as action source");
    plan->add_option("--sample-dt", plan_dt, "trajectory CSV sampling period [s]");

    // check
    auto* check = app.add_subcommand("check", "a-priori safety check of an action");
    std::string check_target, check_action, check_policy;
    check->add_option("--target", check_target, "displacement dx,dy,dz[,droll,dpitch,dyaw]")
        ->required();
    check->add_option("--action", check_action, "action file (13 values)");
    check->add_option("--policy", check_policy, "policy checkpoint as action source");

    // simulate
    auto* simulate = app.add_subcommand("simulate", "run one jump episode");
    std::string sim_command, sim_action, sim_policy;
    simulate->add_option("--command", sim_command, "displacement dx,dy,dz[,droll,dpitch,dyaw]")
        ->required();
    simulate->add_option("--action", sim_action, "action file (13 values)");
    simulate->add_option("--policy", sim_policy, "policy checkpoint as action source");

    // train
    auto* train = app.add_subcommand("train", "train a jumping policy");
    std::string train_cfg;
    int train_envs = 0, train_iters = 0;
    train->add_option("--train", train_cfg, "train config file")->required();
    train->add_option("--envs", train_envs, "parallel environments override");
    train->add_option("--iterations", train_iters, "iteration count override");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "evaluation sweeps over a checkpoint");
    std::string eval_ckpt, eval_suite;
    int eval_samples = 0;
    double eval_threshold = 0.0, eval_p = 0.0, eval_dmax = -1.0;
    evaluate->add_option("--checkpoint", eval_ckpt, "policy checkpoint")->required();
    evaluate->add_option("--suite", eval_suite, "region|avt|height|yaw|robust")->required();
    evaluate->add_option("--samples", eval_samples, "sample count (robust: runs per cell)");
    evaluate->add_option("--threshold", eval_threshold, "landing-error pass threshold [m]");
    evaluate->add_option("--perturb-p", eval_p, "mass perturbation fraction (robust)");
    evaluate->add_option("--dmax", eval_dmax, "max joint damping (robust)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 1;
    }
    seed_given = seed_opt->count() > 0;

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) return fail("cannot create output directory " + out_dir);

    RobotPtr robot = open_robot(robot_path);
    if (!robot) return fail(qj_last_error());
    RewardPtr reward = open_reward(reward_path);
    if (!reward) return fail(qj_last_error());

    if (*plan) {
        double target[6], action[13];
        if (!parse_pose(plan_target, target)) return fail("bad --target");
        if (int rc = resolve_action(plan_action, plan_policy, target, action)) return rc;
        char* summary = nullptr;
        const std::string csv = join_path(out_dir, "trajectory.csv");
        const qj_status st =
            qj_plan(robot.get(), target, action, plan_dt, csv.c_str(), &summary);
        if (summary) {
            std::cout << summary << "\n";
            std::ofstream(join_path(out_dir, "plan.json")) << summary << "\n";
            qj_string_free(summary);
        }
        if (st == QJ_REJECTED) return fail(std::string("plan rejected: ") + qj_last_error(), 2);
        if (st != QJ_OK) return fail(qj_last_error());
        std::cout << "trajectory written to " << csv << "\n";
        return 0;
    }

    if (*check) {
        double target[6], action[13];
        if (!parse_pose(check_target, target)) return fail("bad --target");
        if (int rc = resolve_action(check_action, check_policy, target, action)) return rc;
        char reason[64];
        double landing[3];
        char* report = nullptr;
        const qj_status st = qj_check(robot.get(), target, action, reason, landing, &report);
        if (report) {
            std::cout << report << "\n";
            qj_string_free(report);
        }
        if (st == QJ_REJECTED) return 2;
        if (st != QJ_OK) return fail(qj_last_error());
        return 0;
    }

    if (*simulate) {
        double command[6], action[13];
        if (!parse_pose(sim_command, command)) return fail("bad --command");
        if (int rc = resolve_action(sim_action, sim_policy, command, action)) return rc;
        char* outcome = nullptr;
        const std::string trace = join_path(out_dir, "trace.csv");
        const qj_status st =
            qj_simulate(robot.get(), reward.get(), command, action,
                        mode.empty() ? "ideal" : mode.c_str(), seed, trace.c_str(), &outcome);
        if (outcome) {
            std::cout << outcome << "\n";
            std::ofstream(join_path(out_dir, "outcome.json")) << outcome << "\n";
            qj_string_free(outcome);
        }
        if (st != QJ_OK) return fail(qj_last_error(), status_code(st));
        std::cout << "trace written to " << trace << "\n";
        return 0;
    }

    if (*train) {
        const qj_status st =
            qj_train(robot.get(), reward.get(), train_cfg.c_str(),
                     mode.empty() ? nullptr : mode.c_str(), seed, seed_given ? 1 : 0,
                     train_envs, train_iters, out_dir.c_str());
        if (st == QJ_DIVERGED) return fail(qj_last_error(), 3);
        if (st != QJ_OK) return fail(qj_last_error());
        std::cout << "checkpoint and metrics written to " << out_dir << "\n";
        return 0;
    }

    if (*evaluate) {
        const qj_status st = qj_eval(robot.get(), reward.get(), eval_ckpt.c_str(),
                                     eval_suite.c_str(), mode.empty() ? nullptr : mode.c_str(),
                                     seed, eval_samples, eval_threshold, eval_p, eval_dmax,
                                     out_dir.c_str());
        if (st != QJ_OK) return fail(qj_last_error(), status_code(st));
        std::cout << "suite outputs written to " << out_dir << "\n";
        return 0;
    }

    return fail("no subcommand");
}
