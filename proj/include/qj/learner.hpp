#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "qj/config.hpp"
#include "qj/policy.hpp"
#include "qj/reward.hpp"
#include "qj/simulator.hpp"
#include "qj/thrust.hpp"

namespace qj::learner {

struct TrainConfig {
    PolicyConfig net;
    double clip = 0.2;
    double entropy_coef = 0.01;
    double lr = 1e-3;
    double gamma = 0.99;  // inert for one-step episodes, kept for fidelity
    double lam = 0.95;    // inert for one-step episodes
    double desired_kl = 0.01;
    int epochs = 10;
    int iterations = 2000;
    int n_envs = 256;
    uint64_t seed = 0;
    int checkpoint_every = 50;
    int n_threads = 0;  // 0 = hardware concurrency

    static TrainConfig from_config(const Config& cfg);
};

struct StepResult {
    double reward = 0.0;
    double total_penalty = 0.0;
    std::map<std::string, double> penalties;
};

// One-step-episode environment: a state (command) in, one action, one reward.
class Env {
public:
    virtual ~Env() = default;
    virtual Vec6 sample_state(Rng& rng) = 0;
    virtual StepResult step(const Vec6& state, const Vec13& raw_action) = 0;
};

using EnvFactory = std::function<std::unique_ptr<Env>()>;

// Affine map between the policy's normalized action units and the physical
// ranges; clipping and its excess stay in physical units.
Vec13 action_to_physical(const Vec13& normalized);
Vec13 action_to_normalized(const Vec13& physical);

// Uniform command sampling region for jump training.
struct CommandRegion {
    Vec3 c_lo{-0.6, -0.6, -0.4}, c_hi{1.2, 0.6, 0.4};
    Vec3 phi_lo{0, 0, 0}, phi_hi{0, 0, 0};

    static CommandRegion omnidirectional();  // full training region
    static CommandRegion forward_flat();     // forward-jump flat strip
    static CommandRegion from_config(const Config& cfg);
};

class JumpEnv : public Env {
public:
    JumpEnv(quadruped::QuadrupedModel model, reward::RewardParams rew, sim::EpisodeConfig episode,
            CommandRegion region)
        : model_(std::move(model)), reward_(std::move(rew)), episode_(episode), region_(region) {}

    Vec6 sample_state(Rng& rng) override;
    StepResult step(const Vec6& state, const Vec13& raw_action) override;

private:
    quadruped::QuadrupedModel model_;
    reward::RewardParams reward_;
    sim::EpisodeConfig episode_;
    CommandRegion region_;
};

struct RolloutBatch {
    Eigen::MatrixXd states;      // n x state_dim
    Eigen::MatrixXd actions;     // n x action_dim, normalized units
    Eigen::MatrixXd old_means;   // n x action_dim
    Eigen::VectorXd old_log_std; // action_dim
    Eigen::VectorXd log_probs;   // n
    Eigen::VectorXd rewards;     // n
    Eigen::VectorXd values;      // n
    Eigen::VectorXd advantages;  // n, normalized
    std::map<std::string, double> penalty_means;
    double mean_total_penalty = 0.0;
    int size() const { return static_cast<int>(states.rows()); }
};

// One episode per environment; per-env RNG streams derive from
// (seed, iteration, env index), so results are independent of scheduling.
RolloutBatch collect_rollouts(const GaussianPolicy& policy, const EnvFactory& factory, int n_envs,
                              uint64_t seed, uint64_t iteration, int n_threads = 0);

struct UpdateMetrics {
    double policy_loss = 0.0;
    double value_loss = 0.0;
    double entropy = 0.0;
    double approx_kl = 0.0;
    double lr = 0.0;
    bool diverged = false;
};

struct PolicyGrads {
    std::vector<Layer> actor;
    std::vector<Layer> critic;
    Eigen::VectorXd log_std;
};

// Losses and analytic gradients for one pass over the batch (exposed for
// finite-difference checks).
struct LossReport {
    double policy_loss = 0.0, value_loss = 0.0, entropy = 0.0, approx_kl = 0.0;
    double total() const;
    double entropy_coef = 0.0;
};
LossReport compute_losses(const GaussianPolicy& policy, const RolloutBatch& batch,
                          double clip, double entropy_coef, PolicyGrads* grads);

struct Trainer {
    GaussianPolicy policy;
    Adam adam;
    double lr = 1e-3;
    long iteration = 0;

    explicit Trainer(const TrainConfig& cfg);

    NamedArrays to_arrays() const;
    static Trainer from_arrays(const NamedArrays& arrays, const TrainConfig& cfg);
};

// Clipped-surrogate update with adaptive-KL learning rate; restores the
// pre-update parameters and reports divergence on a non-finite loss.
UpdateMetrics ppo_update(Trainer& trainer, const RolloutBatch& batch, const TrainConfig& cfg);

struct IterationStats {
    long iteration = 0;
    double mean_reward = 0.0;
    double mean_total_penalty = 0.0;
    std::map<std::string, double> penalty_means;
    double approx_kl = 0.0;
    double lr = 0.0;
};

struct TrainResult {
    long completed_iterations = 0;
    bool diverged = false;
    std::string checkpoint_path;
    std::string metrics_path;
    std::vector<IterationStats> history;
};

// Full training loop: iterations x (collect, update), metrics CSV plus a
// periodic checkpoint. Resumes from <out_dir>/checkpoint.qjc when present.
TrainResult train(const TrainConfig& cfg, const EnvFactory& factory, const std::string& out_dir);

}  // namespace qj::learner
