#pragma once

#include <map>
#include <string>
#include <vector>

#include "qj/learner.hpp"
#include "qj/policy.hpp"
#include "qj/reward.hpp"
#include "qj/simulator.hpp"

namespace qj::eval {

struct SweepSpec {
    double x_lo = -0.6, x_hi = 1.2;
    double y_lo = -0.6, y_hi = 0.6;
    double z_lo = -0.4, z_hi = 0.4;
    double yaw_max = kPi / 2;
    double roll_pitch_max = deg2rad(15.0);
    double threshold = 0.2;  // landing-error pass threshold, m
    int samples = 512;
    uint64_t seed = 0;
};

struct EvalContext {
    quadruped::QuadrupedModel model;
    reward::RewardParams reward;
    sim::EpisodeConfig episode;
    int n_threads = 0;  // 0 = hardware concurrency
};

// Deterministic evaluation action: the affine-mapped policy mean.
Vec13 policy_action(const learner::GaussianPolicy& policy, const Vec6& state);

// One evaluation episode for a command; returns the outcome.
sim::EpisodeOutcome eval_episode(const learner::GaussianPolicy& policy,
                                 const thrust::JumpCommand& cmd, const EvalContext& ctx);

struct RegionRow {
    double x, y, landing_error;
    bool pass;
};
std::vector<RegionRow> feasible_region(const learner::GaussianPolicy& policy,
                                       const SweepSpec& spec, const EvalContext& ctx);

struct AvtRow {
    double target_dist, actual_dist;
    bool failed;
};
std::vector<AvtRow> actual_vs_target(const learner::GaussianPolicy& policy, bool backward,
                                     const SweepSpec& spec, const EvalContext& ctx);

struct HeightRow {
    double x, y, z;
};
struct HeightMaps {
    std::vector<HeightRow> up;    // (x, y, max_up_z)
    std::vector<HeightRow> down;  // (x, y, min_down_z)
};
HeightMaps height_map(const learner::GaussianPolicy& policy, const SweepSpec& spec,
                      const EvalContext& ctx);

struct YawRow {
    double yaw_cmd_deg, yaw_err_deg;
};
std::vector<YawRow> yaw_sweep(const learner::GaussianPolicy& policy, const SweepSpec& spec,
                              const EvalContext& ctx);

struct RobustRow {
    std::string jump_type;  // FWD | DIAG
    std::string test;       // NOM | DV | MV
    int runs;
    double ex_mean, ex_std, ey_mean, ey_std, epsi_mean, epsi_std;
};
// Full perturbation matrix {NOM, DV, MV} x {FWD, DIAG}, n runs per cell.
std::vector<RobustRow> robustness_study(const learner::GaussianPolicy& policy, int n_runs,
                                        double perturb_p, double d_max, const SweepSpec& spec,
                                        const EvalContext& ctx);

// CSV writers with exact headers, plus the JSON run-metadata sidecar.
void write_region_csv(const std::string& path, const std::vector<RegionRow>& rows);
void write_avt_csv(const std::string& path, const std::vector<AvtRow>& rows);
void write_height_csv(const std::string& path, const std::vector<HeightRow>& rows,
                      const std::string& z_column);
void write_yaw_csv(const std::string& path, const std::vector<YawRow>& rows);
void write_robust_csv(const std::string& path, const std::vector<RobustRow>& rows);
void write_metadata(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& fields);

}  // namespace qj::eval
