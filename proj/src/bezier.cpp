#include "qj/bezier.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qj::bezier {

double binomial(int n, int i) {
    if (i < 0 || i > n) return 0.0;
    if (i > n - i) i = n - i;
    double c = 1.0;
    for (int k = 1; k <= i; ++k) c = c * static_cast<double>(n - i + k) / static_cast<double>(k);
    return c;
}

double bernstein(int i, int n, double u) {
    if (n < 0 || i < 0 || i > n)
        throw std::domain_error("bernstein: index out of range (i=" + std::to_string(i) +
                                ", n=" + std::to_string(n) + ")");
    return binomial(n, i) * std::pow(u, i) * std::pow(1.0 - u, n - i);
}

ControlPolygon::ControlPolygon(Eigen::MatrixXd points, double duration)
    : points_(std::move(points)), duration_(duration) {
    if (points_.cols() < 1) throw std::domain_error("ControlPolygon: needs at least one point");
    if (points_.rows() < 1 || points_.rows() > 3)
        throw std::domain_error("ControlPolygon: dimension must be 1, 2 or 3");
    if (!(duration_ > 0.0)) throw std::domain_error("ControlPolygon: duration must be positive");
    if (!points_.allFinite()) throw std::domain_error("ControlPolygon: non-finite control point");
}

Eigen::VectorXd ControlPolygon::eval(double t) const {
    if (t < 0.0 || t > duration_)
        throw std::domain_error("ControlPolygon::eval: t outside [0, T]");
    const int n = order();
    const double u = t / duration_;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(dim());
    for (int i = 0; i <= n; ++i) acc += bernstein(i, n, u) * points_.col(i);
    return acc;
}

ControlPolygon ControlPolygon::derivative() const {
    const int n = order();
    if (n == 0) return ControlPolygon(Eigen::MatrixXd::Zero(dim(), 1), duration_);
    Eigen::MatrixXd d(dim(), n);
    for (int i = 0; i < n; ++i)
        d.col(i) = (static_cast<double>(n) / duration_) * (points_.col(i + 1) - points_.col(i));
    return ControlPolygon(std::move(d), duration_);
}

void ControlPolygon::eval_cubic(double t, Eigen::VectorXd& value, Eigen::VectorXd& velocity) const {
    if (order() != 3) throw std::domain_error("eval_cubic: order must be 3");
    if (t < 0.0 || t > duration_)
        throw std::domain_error("eval_cubic: t outside [0, T]");
    const double u = t / duration_;
    const double w = 1.0 - u;
    value = w * w * w * points_.col(0) + 3.0 * w * w * u * points_.col(1) +
            3.0 * w * u * u * points_.col(2) + u * u * u * points_.col(3);
    velocity = (3.0 / duration_) * (w * w * (points_.col(1) - points_.col(0)) +
                                    2.0 * w * u * (points_.col(2) - points_.col(1)) +
                                    u * u * (points_.col(3) - points_.col(2)));
}

}  // namespace qj::bezier
