#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qj/math.hpp"
#include "qj/rng.hpp"

namespace qj::learner {

// Versioned flat container of named real arrays (checkpoints).
struct NamedArrays {
    std::vector<std::pair<std::string, Eigen::MatrixXd>> items;

    void add(const std::string& name, const Eigen::MatrixXd& value) {
        items.emplace_back(name, value);
    }
    const Eigen::MatrixXd* find(const std::string& name) const {
        for (const auto& [n, v] : items)
            if (n == name) return &v;
        return nullptr;
    }
    const Eigen::MatrixXd& get(const std::string& name) const;
};

void write_named_arrays(const std::string& path, const NamedArrays& arrays);
NamedArrays read_named_arrays(const std::string& path);

struct Layer {
    Eigen::MatrixXd w;  // out x in
    Eigen::VectorXd b;  // out
};

// Plain MLP with ELU hidden activations and a linear head. Batches are
// row-major (one sample per row) so the heavy lifting is large GEMMs.
class Mlp {
public:
    struct Tape {
        std::vector<Eigen::MatrixXd> inputs;  // input to each layer
        std::vector<Eigen::MatrixXd> pre;     // pre-activation of each hidden layer
    };

    Mlp() = default;
    Mlp(int in, const std::vector<int>& hidden, int out, double final_scale, Rng& rng);

    Eigen::MatrixXd forward(const Eigen::MatrixXd& x) const;
    Eigen::MatrixXd forward(const Eigen::MatrixXd& x, Tape& tape) const;
    // Accumulates parameter gradients for dL/d(output) = dout.
    void backward(const Tape& tape, const Eigen::MatrixXd& dout, std::vector<Layer>& grads) const;

    std::vector<Layer>& layers() { return layers_; }
    const std::vector<Layer>& layers() const { return layers_; }
    std::vector<Layer> zeros_like() const;
    int input_dim() const {
        return layers_.empty() ? 0 : static_cast<int>(layers_.front().w.cols());
    }
    int output_dim() const {
        return layers_.empty() ? 0 : static_cast<int>(layers_.back().b.size());
    }

private:
    std::vector<Layer> layers_;
};

struct PolicyConfig {
    int state_dim = 6;
    int action_dim = 13;
    std::vector<int> hidden = {512, 256, 128};
    double init_std = 1.0;
    double final_scale = 0.01;  // final-layer weight scale of the actor
};

// Diagonal-Gaussian actor plus a value critic. Action means live in
// normalized units; the affine map to physical ranges happens downstream.
struct GaussianPolicy {
    Mlp actor;
    Mlp critic;
    Eigen::VectorXd log_std;

    GaussianPolicy() = default;
    GaussianPolicy(const PolicyConfig& cfg, uint64_t seed);

    Eigen::MatrixXd mean(const Eigen::MatrixXd& states) const { return actor.forward(states); }
    Eigen::VectorXd value(const Eigen::MatrixXd& states) const {
        return critic.forward(states).col(0);
    }
    Eigen::VectorXd std() const { return log_std.array().exp(); }
    int action_dim() const { return static_cast<int>(log_std.size()); }

    struct Forward {
        Eigen::VectorXd mean;
        Eigen::VectorXd std;
        double value;
    };
    Forward act(const Vec6& state) const;

    NamedArrays to_arrays() const;
    static GaussianPolicy from_arrays(const NamedArrays& arrays);
    void save(const std::string& path) const { write_named_arrays(path, to_arrays()); }
    static GaussianPolicy load(const std::string& path) {
        return from_arrays(read_named_arrays(path));
    }
};

// Gaussian draw around the policy mean; clipping to legal ranges happens in
// the action decoder, not here.
Eigen::VectorXd sample_action(const Eigen::VectorXd& mean, const Eigen::VectorXd& std, Rng& rng);

double gaussian_log_prob(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                         const Eigen::VectorXd& std);

// View into one parameter block and its gradient.
struct ParamView {
    double* value;
    const double* grad;
    Eigen::Index size;
};

// Adam over a flat parameter vector (blocks are walked in a fixed order).
class Adam {
public:
    Adam() = default;
    explicit Adam(Eigen::Index total_size)
        : m(Eigen::VectorXd::Zero(total_size)), v(Eigen::VectorXd::Zero(total_size)) {}
    void step(const std::vector<ParamView>& params, double lr);

    Eigen::VectorXd m, v;
    long t = 0;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
};

}  // namespace qj::learner
