#include "qj/policy.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace qj::learner {

namespace {

constexpr char kMagic[8] = {'Q', 'J', 'N', 'A', '0', '0', '0', '1'};

void elu_inplace(Eigen::MatrixXd& z) {
    z = z.unaryExpr([](double v) { return v > 0.0 ? v : std::expm1(v); });
}

Eigen::MatrixXd elu(const Eigen::MatrixXd& z) {
    return z.unaryExpr([](double v) { return v > 0.0 ? v : std::expm1(v); });
}

Eigen::MatrixXd elu_derivative(const Eigen::MatrixXd& z) {
    return z.unaryExpr([](double v) { return v > 0.0 ? 1.0 : std::exp(v); });
}

// Orthogonal init: QR of a Gaussian matrix, sign-fixed, scaled by gain.
Eigen::MatrixXd orthogonal(int rows, int cols, double gain, Rng& rng) {
    const bool tall = rows >= cols;
    const int r = tall ? rows : cols;
    const int c = tall ? cols : rows;
    Eigen::MatrixXd a(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) a(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(r, c);
    const Eigen::MatrixXd rmat = qr.matrixQR().topRows(c).triangularView<Eigen::Upper>();
    for (int j = 0; j < c; ++j)
        if (rmat(j, j) < 0.0) q.col(j) = -q.col(j);
    Eigen::MatrixXd w = tall ? q : Eigen::MatrixXd(q.transpose());
    return gain * w;
}

}  // namespace

const Eigen::MatrixXd& NamedArrays::get(const std::string& name) const {
    const auto* p = find(name);
    if (!p) throw std::runtime_error("checkpoint: missing array '" + name + "'");
    return *p;
}

void write_named_arrays(const std::string& path, const NamedArrays& arrays) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(kMagic, sizeof(kMagic));
    const uint64_t count = arrays.items.size();
    out.write(reinterpret_cast<const char*>(&count), sizeof(count));
    for (const auto& [name, value] : arrays.items) {
        const uint32_t len = static_cast<uint32_t>(name.size());
        out.write(reinterpret_cast<const char*>(&len), sizeof(len));
        out.write(name.data(), len);
        const uint64_t rows = value.rows(), cols = value.cols();
        out.write(reinterpret_cast<const char*>(&rows), sizeof(rows));
        out.write(reinterpret_cast<const char*>(&cols), sizeof(cols));
        for (Eigen::Index i = 0; i < value.rows(); ++i)
            for (Eigen::Index j = 0; j < value.cols(); ++j) {
                const double d = value(i, j);
                out.write(reinterpret_cast<const char*>(&d), sizeof(d));
            }
    }
    if (!out) throw std::runtime_error("short write: " + path);
}

NamedArrays read_named_arrays(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("not a checkpoint file: " + path);
    uint64_t count = 0;
    in.read(reinterpret_cast<char*>(&count), sizeof(count));
    NamedArrays arrays;
    for (uint64_t k = 0; k < count; ++k) {
        uint32_t len = 0;
        in.read(reinterpret_cast<char*>(&len), sizeof(len));
        std::string name(len, '\0');
        in.read(name.data(), len);
        uint64_t rows = 0, cols = 0;
        in.read(reinterpret_cast<char*>(&rows), sizeof(rows));
        in.read(reinterpret_cast<char*>(&cols), sizeof(cols));
        if (!in || rows > (1u << 24) || cols > (1u << 24))
            throw std::runtime_error("corrupt checkpoint: " + path);
        Eigen::MatrixXd value(rows, cols);
        for (uint64_t i = 0; i < rows; ++i)
            for (uint64_t j = 0; j < cols; ++j) {
                double d = 0;
                in.read(reinterpret_cast<char*>(&d), sizeof(d));
                value(i, j) = d;
            }
        if (!in) throw std::runtime_error("truncated checkpoint: " + path);
        arrays.add(name, value);
    }
    return arrays;
}

Mlp::Mlp(int in, const std::vector<int>& hidden, int out, double final_scale, Rng& rng) {
    int prev = in;
    for (int h : hidden) {
        Layer l;
        l.w = orthogonal(h, prev, std::sqrt(2.0), rng);
        l.b = Eigen::VectorXd::Zero(h);
        layers_.push_back(std::move(l));
        prev = h;
    }
    Layer head;
    head.w = orthogonal(out, prev, final_scale, rng);
    head.b = Eigen::VectorXd::Zero(out);
    layers_.push_back(std::move(head));
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x) const {
    Eigen::MatrixXd a = x;
    for (size_t l = 0; l + 1 < layers_.size(); ++l) {
        a = (a * layers_[l].w.transpose()).rowwise() + layers_[l].b.transpose();
        elu_inplace(a);
    }
    return (a * layers_.back().w.transpose()).rowwise() + layers_.back().b.transpose();
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& x, Tape& tape) const {
    tape.inputs.clear();
    tape.pre.clear();
    Eigen::MatrixXd a = x;
    for (size_t l = 0; l + 1 < layers_.size(); ++l) {
        tape.inputs.push_back(a);
        Eigen::MatrixXd z = (a * layers_[l].w.transpose()).rowwise() + layers_[l].b.transpose();
        tape.pre.push_back(z);
        a = elu(z);
    }
    tape.inputs.push_back(a);
    return (a * layers_.back().w.transpose()).rowwise() + layers_.back().b.transpose();
}

void Mlp::backward(const Tape& tape, const Eigen::MatrixXd& dout,
                   std::vector<Layer>& grads) const {
    Eigen::MatrixXd delta = dout;  // n x out of current layer
    for (int l = static_cast<int>(layers_.size()) - 1; l >= 0; --l) {
        grads[l].w += delta.transpose() * tape.inputs[l];
        grads[l].b += delta.colwise().sum().transpose();
        if (l > 0) {
            delta = delta * layers_[l].w;  // gradient w.r.t. layer input
            delta.array() *= elu_derivative(tape.pre[l - 1]).array();
        }
    }
}

std::vector<Layer> Mlp::zeros_like() const {
    std::vector<Layer> out;
    for (const auto& l : layers_)
        out.push_back({Eigen::MatrixXd::Zero(l.w.rows(), l.w.cols()),
                       Eigen::VectorXd::Zero(l.b.size())});
    return out;
}

GaussianPolicy::GaussianPolicy(const PolicyConfig& cfg, uint64_t seed) {
    Rng rng(derive_seed(seed, 0x706f6c696379ULL));
    actor = Mlp(cfg.state_dim, cfg.hidden, cfg.action_dim, cfg.final_scale, rng);
    critic = Mlp(cfg.state_dim, cfg.hidden, 1, 1.0, rng);
    log_std = Eigen::VectorXd::Constant(cfg.action_dim, std::log(cfg.init_std));
}

GaussianPolicy::Forward GaussianPolicy::act(const Vec6& state) const {
    Forward out;
    const Eigen::MatrixXd s = state.transpose();
    out.mean = actor.forward(s).row(0).transpose();
    out.std = std();
    out.value = critic.forward(s)(0, 0);
    return out;
}

NamedArrays GaussianPolicy::to_arrays() const {
    NamedArrays arrays;
    auto dump = [&](const Mlp& net, const std::string& prefix) {
        for (size_t l = 0; l < net.layers().size(); ++l) {
            arrays.add(prefix + ".w" + std::to_string(l), net.layers()[l].w);
            arrays.add(prefix + ".b" + std::to_string(l), net.layers()[l].b);
        }
    };
    dump(actor, "actor");
    dump(critic, "critic");
    arrays.add("log_std", log_std);
    return arrays;
}

GaussianPolicy GaussianPolicy::from_arrays(const NamedArrays& arrays) {
    GaussianPolicy p;
    auto load = [&](Mlp& net, const std::string& prefix) {
        for (int l = 0;; ++l) {
            const auto* w = arrays.find(prefix + ".w" + std::to_string(l));
            if (!w) break;
            Layer layer;
            layer.w = *w;
            layer.b = arrays.get(prefix + ".b" + std::to_string(l));
            net.layers().push_back(std::move(layer));
        }
        if (net.layers().empty())
            throw std::runtime_error("checkpoint: no layers for " + prefix);
    };
    load(p.actor, "actor");
    load(p.critic, "critic");
    p.log_std = arrays.get("log_std");
    return p;
}

Eigen::VectorXd sample_action(const Eigen::VectorXd& mean, const Eigen::VectorXd& std, Rng& rng) {
    Eigen::VectorXd out(mean.size());
    for (Eigen::Index i = 0; i < mean.size(); ++i) {
        if (!(std[i] > 0)) throw std::domain_error("sample_action: std must be positive");
        out[i] = mean[i] + std[i] * rng.normal();
    }
    return out;
}

double gaussian_log_prob(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                         const Eigen::VectorXd& std) {
    constexpr double kLog2Pi = 1.8378770664093454836;
    double lp = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double z = (x[i] - mean[i]) / std[i];
        lp += -0.5 * z * z - std::log(std[i]) - 0.5 * kLog2Pi;
    }
    return lp;
}

void Adam::step(const std::vector<ParamView>& params, double lr) {
    ++t;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    Eigen::Index off = 0;
    for (const auto& p : params) {
        if (off + p.size > m.size()) throw std::logic_error("Adam: parameter size mismatch");
        for (Eigen::Index i = 0; i < p.size; ++i, ++off) {
            m[off] = beta1 * m[off] + (1.0 - beta1) * p.grad[i];
            v[off] = beta2 * v[off] + (1.0 - beta2) * p.grad[i] * p.grad[i];
            p.value[i] -= lr * (m[off] / bc1) / (std::sqrt(v[off] / bc2) + eps);
        }
    }
}

}  // namespace qj::learner
