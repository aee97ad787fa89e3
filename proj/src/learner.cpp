#include "qj/learner.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <thread>

#include "qj/csv.hpp"

namespace qj::learner {

namespace fs = std::filesystem;

TrainConfig TrainConfig::from_config(const Config& cfg) {
    TrainConfig t;
    const std::string sec = "train";
    t.clip = cfg.get_num(sec, "clip", t.clip);
    t.entropy_coef = cfg.get_num(sec, "entropy_coef", t.entropy_coef);
    t.lr = cfg.get_num(sec, "lr", t.lr);
    t.gamma = cfg.get_num(sec, "gamma", t.gamma);
    t.lam = cfg.get_num(sec, "lam", t.lam);
    t.desired_kl = cfg.get_num(sec, "desired_kl", t.desired_kl);
    t.epochs = static_cast<int>(cfg.get_int(sec, "epochs", t.epochs));
    t.iterations = static_cast<int>(cfg.get_int(sec, "iterations", t.iterations));
    t.n_envs = static_cast<int>(cfg.get_int(sec, "n_envs", t.n_envs));
    t.seed = static_cast<uint64_t>(cfg.get_int(sec, "seed", 0));
    t.checkpoint_every = static_cast<int>(cfg.get_int(sec, "checkpoint_every", t.checkpoint_every));
    t.n_threads = static_cast<int>(cfg.get_int(sec, "threads", t.n_threads));
    if (cfg.has(sec, "hidden")) {
        t.net.hidden.clear();
        for (double h : cfg.get_vec(sec, "hidden")) t.net.hidden.push_back(static_cast<int>(h));
    }
    t.net.init_std = cfg.get_num(sec, "init_std", t.net.init_std);
    if (!(t.clip > 0.0 && t.clip < 1.0)) throw ConfigError("train: clip must be in (0, 1)");
    if (t.epochs < 1 || t.iterations < 1 || t.n_envs < 1)
        throw ConfigError("train: epochs, iterations and n_envs must be positive");
    return t;
}

Vec13 action_to_physical(const Vec13& normalized) {
    const auto& ranges = thrust::action_ranges();
    Vec13 out;
    for (int i = 0; i < 13; ++i) {
        const double center = 0.5 * (ranges[i].first + ranges[i].second);
        const double half = 0.5 * (ranges[i].second - ranges[i].first);
        out[i] = center + normalized[i] * half;
    }
    return out;
}

Vec13 action_to_normalized(const Vec13& physical) {
    const auto& ranges = thrust::action_ranges();
    Vec13 out;
    for (int i = 0; i < 13; ++i) {
        const double center = 0.5 * (ranges[i].first + ranges[i].second);
        const double half = 0.5 * (ranges[i].second - ranges[i].first);
        out[i] = (physical[i] - center) / half;
    }
    return out;
}

CommandRegion CommandRegion::omnidirectional() {
    CommandRegion r;
    r.c_lo = Vec3(-0.6, -0.6, -0.4);
    r.c_hi = Vec3(1.2, 0.6, 0.4);
    r.phi_lo = Vec3(-deg2rad(15.0), -deg2rad(15.0), -kPi / 2);
    r.phi_hi = Vec3(deg2rad(15.0), deg2rad(15.0), kPi / 2);
    return r;
}

CommandRegion CommandRegion::forward_flat() {
    CommandRegion r;
    r.c_lo = Vec3(0.0, -0.3, 0.0);
    r.c_hi = Vec3(1.2, 0.3, 0.0);
    r.phi_lo = Vec3::Zero();
    r.phi_hi = Vec3::Zero();
    return r;
}

CommandRegion CommandRegion::from_config(const Config& cfg) {
    const std::string sec = "commands";
    const std::string preset = cfg.get_str(sec, "region", "omnidirectional");
    CommandRegion r;
    if (preset == "omnidirectional")
        r = omnidirectional();
    else if (preset == "forward_flat")
        r = forward_flat();
    else
        throw ConfigError("commands: unknown region preset: " + preset);
    auto v3 = [&](const char* key, Vec3 fallback) {
        const auto v = cfg.get_vec(sec, key, {fallback.x(), fallback.y(), fallback.z()});
        if (v.size() != 3) throw ConfigError(std::string(key) + ": expected 3 numbers");
        return Vec3(v[0], v[1], v[2]);
    };
    r.c_lo = v3("c_lo", r.c_lo);
    r.c_hi = v3("c_hi", r.c_hi);
    r.phi_lo = v3("phi_lo", r.phi_lo);
    r.phi_hi = v3("phi_hi", r.phi_hi);
    for (int i = 0; i < 3; ++i)
        if (r.c_lo[i] > r.c_hi[i] || r.phi_lo[i] > r.phi_hi[i])
            throw ConfigError("commands: region bounds out of order");
    return r;
}

Vec6 JumpEnv::sample_state(Rng& rng) {
    Vec6 s;
    for (int i = 0; i < 3; ++i) s[i] = rng.uniform(region_.c_lo[i], region_.c_hi[i]);
    for (int i = 0; i < 3; ++i) s[3 + i] = rng.uniform(region_.phi_lo[i], region_.phi_hi[i]);
    return s;
}

StepResult JumpEnv::step(const Vec6& state, const Vec13& raw_action) {
    thrust::JumpCommand cmd{state.head<3>(), state.tail<3>()};
    const sim::EpisodeOutcome outcome = sim::run_episode(model_, cmd, raw_action, episode_);
    StepResult r;
    r.reward = reward::episode_reward(outcome, reward_);
    r.penalties = reward::assemble_penalties(outcome, reward_);
    for (const auto& [key, value] : r.penalties) r.total_penalty += reward_.weight(key) * value;
    return r;
}

RolloutBatch collect_rollouts(const GaussianPolicy& policy, const EnvFactory& factory, int n_envs,
                              uint64_t seed, uint64_t iteration, int n_threads) {
    if (n_envs < 1) throw std::invalid_argument("collect_rollouts: n_envs must be >= 1");
    const int state_dim = policy.actor.input_dim();
    const int action_dim = policy.action_dim();

    RolloutBatch batch;
    batch.states.resize(n_envs, state_dim);
    batch.actions.resize(n_envs, action_dim);
    batch.log_probs.resize(n_envs);
    batch.rewards.resize(n_envs);
    batch.old_log_std = policy.log_std;

    std::vector<std::unique_ptr<Env>> envs(n_envs);
    std::vector<Rng> rngs;
    rngs.reserve(n_envs);
    for (int i = 0; i < n_envs; ++i) {
        envs[i] = factory();
        rngs.emplace_back(derive_seed(seed, iteration, static_cast<uint64_t>(i)));
        batch.states.row(i) = envs[i]->sample_state(rngs[i]).transpose();
    }

    batch.old_means = policy.mean(batch.states);
    batch.values = policy.value(batch.states);
    const Eigen::VectorXd std = policy.std();
    for (int i = 0; i < n_envs; ++i) {
        const Eigen::VectorXd u =
            sample_action(batch.old_means.row(i).transpose(), std, rngs[i]);
        batch.actions.row(i) = u.transpose();
        batch.log_probs[i] = gaussian_log_prob(u, batch.old_means.row(i).transpose(), std);
    }

    std::vector<StepResult> results(n_envs);
    int threads = n_threads > 0 ? n_threads
                                : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, n_envs));
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n_envs) return;
            const Vec6 s = batch.states.row(i).transpose();
            const Vec13 u = batch.actions.row(i).transpose();
            results[i] = envs[i]->step(s, action_to_physical(u));
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (int i = 0; i < n_envs; ++i) {
        batch.rewards[i] = results[i].reward;
        batch.mean_total_penalty += results[i].total_penalty;
        for (const auto& [key, value] : results[i].penalties) batch.penalty_means[key] += value;
    }
    batch.mean_total_penalty /= n_envs;
    for (auto& [key, value] : batch.penalty_means) value /= n_envs;

    // One-step episodes: return = reward, advantage = reward - value,
    // normalized per batch.
    batch.advantages = batch.rewards - batch.values;
    const double mean = batch.advantages.mean();
    const double var =
        (batch.advantages.array() - mean).square().sum() / std::max(1, n_envs - 1);
    const double sd = std::sqrt(var);
    if (sd > 1e-12)
        batch.advantages = (batch.advantages.array() - mean) / (sd + 1e-8);
    else
        batch.advantages.setZero();
    return batch;
}

double LossReport::total() const { return policy_loss - entropy_coef * entropy + value_loss; }

LossReport compute_losses(const GaussianPolicy& policy, const RolloutBatch& batch, double clip,
                          double entropy_coef, PolicyGrads* grads) {
    const int n = batch.size();
    const int adim = policy.action_dim();
    LossReport report;
    report.entropy_coef = entropy_coef;

    Mlp::Tape actor_tape, critic_tape;
    const Eigen::MatrixXd means = policy.actor.forward(batch.states, actor_tape);
    const Eigen::VectorXd values = policy.critic.forward(batch.states, critic_tape).col(0);

    const Eigen::VectorXd sigma = policy.std();
    const Eigen::VectorXd sigma_old = batch.old_log_std.array().exp();
    constexpr double kLog2Pi = 1.8378770664093454836;

    Eigen::VectorXd logp_new(n);
    const Eigen::MatrixXd diff = batch.actions - means;
    for (int i = 0; i < n; ++i) {
        double lp = 0.0;
        for (int d = 0; d < adim; ++d) {
            const double z = diff(i, d) / sigma[d];
            lp += -0.5 * z * z - policy.log_std[d] - 0.5 * kLog2Pi;
        }
        logp_new[i] = lp;
    }

    const Eigen::ArrayXd ratio = (logp_new - batch.log_probs).array().exp();
    const Eigen::ArrayXd adv = batch.advantages.array();
    const Eigen::ArrayXd surr1 = ratio * adv;
    const Eigen::ArrayXd surr2 = ratio.min(1.0 + clip).max(1.0 - clip) * adv;
    report.policy_loss = -surr1.min(surr2).mean();

    // Entropy of the state-independent diagonal Gaussian.
    report.entropy = (policy.log_std.array() + 0.5 * (kLog2Pi + 1.0)).sum();

    // Analytic KL(old || new), averaged over the batch.
    double kl = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int d = 0; d < adim; ++d) {
            const double dm = batch.old_means(i, d) - means(i, d);
            kl += std::log(sigma[d] / sigma_old[d]) +
                  (sigma_old[d] * sigma_old[d] + dm * dm) / (2.0 * sigma[d] * sigma[d]) - 0.5;
        }
    }
    report.approx_kl = kl / n;

    const Eigen::VectorXd verr = values - batch.rewards;
    report.value_loss = verr.squaredNorm() / n;

    if (grads) {
        grads->actor = policy.actor.zeros_like();
        grads->critic = policy.critic.zeros_like();
        grads->log_std = Eigen::VectorXd::Zero(adim);

        Eigen::MatrixXd dmu(n, adim);
        for (int i = 0; i < n; ++i) {
            const bool active = surr1[i] <= surr2[i];
            const double coeff = active ? -(1.0 / n) * adv[i] * ratio[i] : 0.0;
            for (int d = 0; d < adim; ++d) {
                // dlogp/dmu = diff/sigma^2, dlogp/dlogsigma = diff^2/sigma^2 - 1
                dmu(i, d) = coeff * diff(i, d) / (sigma[d] * sigma[d]);
                grads->log_std[d] += coeff * (diff(i, d) * diff(i, d) / (sigma[d] * sigma[d]) - 1.0);
            }
        }
        grads->log_std.array() -= entropy_coef;
        policy.actor.backward(actor_tape, dmu, grads->actor);

        const Eigen::MatrixXd dv = (2.0 / n) * verr;
        policy.critic.backward(critic_tape, dv, grads->critic);
    }
    return report;
}

Trainer::Trainer(const TrainConfig& cfg) : policy(cfg.net, cfg.seed), lr(cfg.lr) {
    Eigen::Index total = 0;
    for (const auto& l : policy.actor.layers()) total += l.w.size() + l.b.size();
    for (const auto& l : policy.critic.layers()) total += l.w.size() + l.b.size();
    total += policy.log_std.size();
    adam = Adam(total);
}

namespace {

std::vector<ParamView> param_views(GaussianPolicy& policy, PolicyGrads& grads) {
    std::vector<ParamView> views;
    for (size_t l = 0; l < policy.actor.layers().size(); ++l) {
        auto& layer = policy.actor.layers()[l];
        auto& g = grads.actor[l];
        views.push_back({layer.w.data(), g.w.data(), layer.w.size()});
        views.push_back({layer.b.data(), g.b.data(), layer.b.size()});
    }
    for (size_t l = 0; l < policy.critic.layers().size(); ++l) {
        auto& layer = policy.critic.layers()[l];
        auto& g = grads.critic[l];
        views.push_back({layer.w.data(), g.w.data(), layer.w.size()});
        views.push_back({layer.b.data(), g.b.data(), layer.b.size()});
    }
    views.push_back({policy.log_std.data(), grads.log_std.data(), policy.log_std.size()});
    return views;
}

std::vector<Eigen::VectorXd> snapshot_params(const GaussianPolicy& policy) {
    std::vector<Eigen::VectorXd> snap;
    for (const auto& l : policy.actor.layers()) {
        snap.emplace_back(Eigen::Map<const Eigen::VectorXd>(l.w.data(), l.w.size()));
        snap.emplace_back(l.b);
    }
    for (const auto& l : policy.critic.layers()) {
        snap.emplace_back(Eigen::Map<const Eigen::VectorXd>(l.w.data(), l.w.size()));
        snap.emplace_back(l.b);
    }
    snap.emplace_back(policy.log_std);
    return snap;
}

void restore_params(GaussianPolicy& policy, const std::vector<Eigen::VectorXd>& snap) {
    size_t k = 0;
    for (auto& l : policy.actor.layers()) {
        Eigen::Map<Eigen::VectorXd>(l.w.data(), l.w.size()) = snap[k++];
        l.b = snap[k++];
    }
    for (auto& l : policy.critic.layers()) {
        Eigen::Map<Eigen::VectorXd>(l.w.data(), l.w.size()) = snap[k++];
        l.b = snap[k++];
    }
    policy.log_std = snap[k++];
}

}  // namespace

NamedArrays Trainer::to_arrays() const {
    NamedArrays arrays = policy.to_arrays();
    arrays.add("adam.m", adam.m);
    arrays.add("adam.v", adam.v);
    Eigen::MatrixXd meta(1, 3);
    meta << static_cast<double>(adam.t), lr, static_cast<double>(iteration);
    arrays.add("trainer.meta", meta);
    return arrays;
}

Trainer Trainer::from_arrays(const NamedArrays& arrays, const TrainConfig& cfg) {
    Trainer t(cfg);
    t.policy = GaussianPolicy::from_arrays(arrays);
    t.adam.m = arrays.get("adam.m");
    t.adam.v = arrays.get("adam.v");
    const Eigen::MatrixXd& meta = arrays.get("trainer.meta");
    t.adam.t = static_cast<long>(meta(0, 0));
    t.lr = meta(0, 1);
    t.iteration = static_cast<long>(meta(0, 2));
    return t;
}

UpdateMetrics ppo_update(Trainer& trainer, const RolloutBatch& batch, const TrainConfig& cfg) {
    UpdateMetrics metrics;
    const auto snapshot = snapshot_params(trainer.policy);
    const long adam_t = trainer.adam.t;
    const Eigen::VectorXd adam_m = trainer.adam.m, adam_v = trainer.adam.v;
    const double lr_in = trainer.lr;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        PolicyGrads grads;
        const LossReport report =
            compute_losses(trainer.policy, batch, cfg.clip, cfg.entropy_coef, &grads);
        if (!std::isfinite(report.total())) {
            restore_params(trainer.policy, snapshot);
            trainer.adam.t = adam_t;
            trainer.adam.m = adam_m;
            trainer.adam.v = adam_v;
            trainer.lr = lr_in;
            metrics.diverged = true;
            return metrics;
        }
        if (cfg.desired_kl > 0.0) {
            if (report.approx_kl > 2.0 * cfg.desired_kl)
                trainer.lr = std::max(1e-6, trainer.lr / 2.0);
            else if (report.approx_kl < 0.5 * cfg.desired_kl)
                trainer.lr = std::min(1e-2, trainer.lr * 2.0);
        }
        const auto views = param_views(trainer.policy, grads);
        trainer.adam.step(views, trainer.lr);
        metrics.policy_loss = report.policy_loss;
        metrics.value_loss = report.value_loss;
        metrics.entropy = report.entropy;
        metrics.approx_kl = report.approx_kl;
    }
    metrics.lr = trainer.lr;
    return metrics;
}

TrainResult train(const TrainConfig& cfg, const EnvFactory& factory, const std::string& out_dir) {
    fs::create_directories(out_dir);
    TrainResult result;
    result.checkpoint_path = (fs::path(out_dir) / "checkpoint.qjc").string();
    result.metrics_path = (fs::path(out_dir) / "metrics.csv").string();

    Trainer trainer(cfg);
    bool resumed = false;
    if (fs::exists(result.checkpoint_path)) {
        trainer = Trainer::from_arrays(read_named_arrays(result.checkpoint_path), cfg);
        resumed = trainer.iteration > 0;
    }

    std::ofstream metrics(result.metrics_path, resumed ? std::ios::app : std::ios::trunc);
    if (!metrics) throw std::runtime_error("cannot open " + result.metrics_path);
    if (!resumed) {
        metrics << "iteration,mean_reward,mean_total_penalty";
        for (const auto& key : sim::penalty_keys()) metrics << ',' << key;
        metrics << ",approx_kl,lr\n";
    }

    for (long it = trainer.iteration; it < cfg.iterations; ++it) {
        RolloutBatch batch = collect_rollouts(trainer.policy, factory, cfg.n_envs, cfg.seed,
                                              static_cast<uint64_t>(it), cfg.n_threads);
        const UpdateMetrics update = ppo_update(trainer, batch, cfg);
        if (update.diverged) {
            result.diverged = true;
            break;
        }
        trainer.iteration = it + 1;

        IterationStats stats;
        stats.iteration = it;
        stats.mean_reward = batch.rewards.mean();
        stats.mean_total_penalty = batch.mean_total_penalty;
        stats.penalty_means = batch.penalty_means;
        stats.approx_kl = update.approx_kl;
        stats.lr = update.lr;
        result.history.push_back(stats);

        metrics << it << ',' << CsvWriter::format(stats.mean_reward) << ','
                << CsvWriter::format(stats.mean_total_penalty);
        for (const auto& key : sim::penalty_keys()) {
            const auto found = stats.penalty_means.find(key);
            metrics << ','
                    << CsvWriter::format(found == stats.penalty_means.end() ? 0.0 : found->second);
        }
        metrics << ',' << CsvWriter::format(stats.approx_kl) << ','
                << CsvWriter::format(stats.lr) << '\n';
        metrics.flush();

        if ((it + 1) % cfg.checkpoint_every == 0 || it + 1 == cfg.iterations)
            write_named_arrays(result.checkpoint_path, trainer.to_arrays());
    }
    result.completed_iterations = trainer.iteration;
    return result;
}

}  // namespace qj::learner
