#include "qj/reward.hpp"

#include <cmath>

namespace qj::reward {

RewardParams RewardParams::from_config(const Config& cfg) {
    RewardParams p;
    const std::string sec = "reward";
    p.sigma_e = cfg.get_num(sec, "sigma_e", p.sigma_e);
    p.sigma_d = cfg.get_num(sec, "sigma_d", p.sigma_d);
    p.c_dx_default = cfg.get_num(sec, "c_dx_default", p.c_dx_default);
    if (!(p.sigma_e > 0) || !(p.sigma_d > 0))
        throw ConfigError("reward: sigma_e and sigma_d must be positive");
    for (const auto& key : cfg.keys(sec)) {
        if (key.rfind("w_", 0) == 0) {
            const double w = cfg.get_num(sec, key);
            if (w < 0) throw ConfigError("reward: negative weight for " + key);
            p.weights[key.substr(2)] = w;
        }
    }
    return p;
}

double activation(double x, double lo, double hi) {
    return std::abs(std::min(x - lo, 0.0) + std::max(x - hi, 0.0));
}

double landing_reward(const Vec3& c_final, const Vec3& c0, const Vec3& c_tg,
                      const RewardParams& params) {
    const double e_tg = (c_tg - c_final).norm();
    const double dist = (c_tg - c0).norm();
    return std::exp(-e_tg / params.sigma_e) * std::exp(dist / params.sigma_d);
}

double total_reward(double r_lt, const std::map<std::string, double>& penalties,
                    const RewardParams& params) {
    double sum = 0.0;
    for (const auto& [key, value] : penalties) sum += params.weight(key) * value;
    return r_lt * std::exp(-sum * sum);
}

std::map<std::string, double> assemble_penalties(const sim::EpisodeOutcome& outcome,
                                                 const RewardParams& params) {
    std::map<std::string, double> out = outcome.penalties;
    for (const auto& key : sim::penalty_keys())
        if (!out.count(key)) out[key] = 0.0;
    const bool valid_touchdown =
        outcome.touchdown.has_value() && outcome.failure != sim::Failure::kNonFootContact;
    if (!valid_touchdown && outcome.failure != sim::Failure::kFilterRejected)
        out[sim::penalty::kTouchdownDrift] = params.c_dx_default;
    return out;
}

double episode_reward(const sim::EpisodeOutcome& outcome, const RewardParams& params) {
    if (outcome.failure != sim::Failure::kNone) return 0.0;
    const double r_lt = landing_reward(outcome.final_c, outcome.start_c, outcome.target_c, params);
    return total_reward(r_lt, assemble_penalties(outcome, params), params);
}

}  // namespace qj::reward
