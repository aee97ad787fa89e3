#pragma once

#include <Eigen/Dense>

#include "qj/math.hpp"

namespace qj::bezier {

// Bernstein basis polynomial b_i^n(u) = C(n,i) u^i (1-u)^(n-i), u in [0,1].
// Throws std::domain_error for i or n out of range.
double bernstein(int i, int n, double u);

// Binomial coefficient via the multiplicative recurrence; exact for n <= 30.
double binomial(int n, int i);

// Bezier curve of arbitrary order and dimension over [0, duration].
// Points are stored as a D x (n+1) matrix, one control point per column.
class ControlPolygon {
public:
    ControlPolygon(Eigen::MatrixXd points, double duration);

    int order() const { return static_cast<int>(points_.cols()) - 1; }
    int dim() const { return static_cast<int>(points_.rows()); }
    double duration() const { return duration_; }
    const Eigen::MatrixXd& points() const { return points_; }
    Eigen::VectorXd point(int i) const { return points_.col(i); }

    // Curve value at t in [0, duration]; out-of-range t is rejected, the
    // thrust reference must never extrapolate.
    Eigen::VectorXd eval(double t) const;

    // Derivative curve: order n-1, points (n/T)(P_{i+1}-P_i), same duration.
    // Order 0 yields the zero polygon of order 0.
    ControlPolygon derivative() const;

    // Closed-form cubic and its quadratic derivative in normalized time t/T.
    // Requires order == 3.
    void eval_cubic(double t, Eigen::VectorXd& value, Eigen::VectorXd& velocity) const;

private:
    Eigen::MatrixXd points_;
    double duration_;
};

}  // namespace qj::bezier
