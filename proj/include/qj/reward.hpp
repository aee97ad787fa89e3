#pragma once

#include <map>
#include <string>

#include "qj/config.hpp"
#include "qj/math.hpp"
#include "qj/simulator.hpp"

namespace qj::reward {

struct RewardParams {
    double sigma_e = 0.1;       // landing-error scale, m
    double sigma_d = 1.0;       // jump-distance scale, m
    double c_dx_default = 10.0; // drift cost when no valid touchdown exists
    std::map<std::string, double> weights;  // per-penalty; missing keys weigh 1

    double weight(const std::string& key) const {
        const auto it = weights.find(key);
        return it == weights.end() ? 1.0 : it->second;
    }

    static RewardParams defaults() { return {}; }
    // Keys: sigma_e, sigma_d, c_dx_default, and w_<penalty> entries.
    static RewardParams from_config(const Config& cfg);
};

// Linear activation: zero inside [lo, hi], distance to the band outside.
double activation(double x, double lo, double hi);

// Landing target reward: accuracy factor scaled up with commanded distance.
double landing_reward(const Vec3& c_final, const Vec3& c0, const Vec3& c_tg,
                      const RewardParams& params);

// R = R_lt * exp(-(sum_i w_i C_i)^2).
double total_reward(double r_lt, const std::map<std::string, double>& penalties,
                    const RewardParams& params);

// Final penalty map from an episode outcome: path penalties pass through,
// the touchdown drift cost falls back to c_dx_default when no valid
// touchdown was detected.
std::map<std::string, double> assemble_penalties(const sim::EpisodeOutcome& outcome,
                                                 const RewardParams& params);

// Full episode reward; a failed episode (any failure flag) earns zero.
double episode_reward(const sim::EpisodeOutcome& outcome, const RewardParams& params);

}  // namespace qj::reward
