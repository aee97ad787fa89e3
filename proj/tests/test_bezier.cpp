#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qj/bezier.hpp"
#include "qj/rng.hpp"

#include "oracles.hpp"

using namespace qj;
using bezier::bernstein;
using bezier::ControlPolygon;

namespace {

ControlPolygon random_cubic(Rng& rng, int dim = 3) {
    Eigen::MatrixXd p(dim, 4);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < 4; ++j) p(i, j) = rng.uniform(-2.0, 2.0);
    return ControlPolygon(p, rng.uniform(0.2, 3.0));
}

}  // namespace

TEST_CASE("bernstein endpoints and range") {
    CHECK(bernstein(0, 3, 0.0) == doctest::Approx(1.0));
    CHECK(bernstein(3, 3, 1.0) == doctest::Approx(1.0));
    CHECK(bernstein(1, 3, 0.0) == doctest::Approx(0.0));
    CHECK_THROWS_AS(bernstein(4, 3, 0.5), std::domain_error);
    CHECK_THROWS_AS(bernstein(-1, 3, 0.5), std::domain_error);
}

TEST_CASE("bernstein partition of unity") {
    double sum = 0.0;
    for (int i = 0; i <= 5; ++i) sum += bernstein(i, 5, 0.37);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

    Rng rng(7);
    for (int n = 0; n <= 10; ++n) {
        for (int trial = 0; trial < 20; ++trial) {
            const double u = rng.uniform();
            double s = 0.0;
            for (int i = 0; i <= n; ++i) s += bernstein(i, n, u);
            CHECK(std::abs(s - 1.0) <= 1e-12);
        }
    }
}

TEST_CASE("eval interpolates endpoints exactly") {
    Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const ControlPolygon poly = random_cubic(rng);
        CHECK((poly.eval(0.0) - poly.point(0)).norm() <= 1e-12);
        CHECK((poly.eval(poly.duration()) - poly.point(3)).norm() <= 1e-12);
    }
}

TEST_CASE("constant polygon stays constant") {
    Eigen::MatrixXd p(3, 5);
    const Eigen::Vector3d c(0.4, -1.2, 2.0);
    for (int j = 0; j < 5; ++j) p.col(j) = c;
    const ControlPolygon poly(p, 1.7);
    for (double t : {0.0, 0.3, 0.85, 1.7}) CHECK((poly.eval(t) - c).norm() <= 1e-12);
}

TEST_CASE("eval matches de Casteljau") {
    Rng rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        const ControlPolygon poly = random_cubic(rng);
        const double t = 0.4 * poly.duration();
        const Eigen::VectorXd ours = poly.eval(t);
        const Eigen::VectorXd oracle = oracles::de_casteljau(poly.points(), poly.duration(), t);
        CHECK((ours - oracle).norm() <= 1e-12);
    }
}

TEST_CASE("eval rejects out-of-range t") {
    Rng rng(5);
    const ControlPolygon poly = random_cubic(rng);
    CHECK_THROWS_AS(poly.eval(-1e-9), std::domain_error);
    CHECK_THROWS_AS(poly.eval(poly.duration() + 1e-9), std::domain_error);
}

TEST_CASE("derivative drops order and matches finite differences") {
    Rng rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const ControlPolygon poly = random_cubic(rng);
        const ControlPolygon der = poly.derivative();
        CHECK(der.order() == 2);
        const double h = 1e-6;
        for (double frac : {0.2, 0.5, 0.8}) {
            const double t = frac * poly.duration();
            const Eigen::VectorXd fd =
                (poly.eval(t + h) - poly.eval(t - h)) / (2.0 * h);
            const Eigen::VectorXd an = der.eval(t);
            CHECK((an - fd).norm() <= 1e-6 * std::max(1.0, an.norm()));
        }
    }
}

TEST_CASE("derivative of constant polygon is zero") {
    Eigen::MatrixXd p(2, 4);
    for (int j = 0; j < 4; ++j) p.col(j) = Eigen::Vector2d(1.0, -3.0);
    const ControlPolygon der = ControlPolygon(p, 0.9).derivative();
    CHECK(der.points().norm() == 0.0);
}

TEST_CASE("derivative of order-0 polygon is the zero polygon") {
    Eigen::MatrixXd p(3, 1);
    p.col(0) = Eigen::Vector3d(1, 2, 3);
    const ControlPolygon der = ControlPolygon(p, 1.0).derivative();
    CHECK(der.order() == 0);
    CHECK(der.points().norm() == 0.0);
}

TEST_CASE("derivative of an order-1 polygon is constant") {
    Eigen::MatrixXd p(3, 2);
    p.col(0) = Eigen::Vector3d(0, 0, 0);
    p.col(1) = Eigen::Vector3d(1, 2, 3);
    const ControlPolygon der = ControlPolygon(p, 2.0).derivative();
    CHECK(der.order() == 0);
    CHECK((der.eval(0.0) - der.eval(2.0)).norm() <= 1e-15);
}

TEST_CASE("explicit cubic matches generic path") {
    Rng rng(47);
    for (int trial = 0; trial < 100; ++trial) {
        const ControlPolygon poly = random_cubic(rng);
        const ControlPolygon der = poly.derivative();
        const double t = rng.uniform(0.0, poly.duration());
        Eigen::VectorXd value, velocity;
        poly.eval_cubic(t, value, velocity);
        CHECK((value - poly.eval(t)).norm() <= 1e-12);
        CHECK((velocity - der.eval(t)).norm() <= 1e-12);
    }
}

TEST_CASE("explicit cubic endpoints") {
    Rng rng(53);
    const ControlPolygon poly = random_cubic(rng);
    const double T = poly.duration();
    Eigen::VectorXd v0, d0, v1, d1;
    poly.eval_cubic(0.0, v0, d0);
    poly.eval_cubic(T, v1, d1);
    CHECK((v0 - poly.point(0)).norm() <= 1e-12);
    CHECK((d0 - 3.0 / T * (poly.point(1) - poly.point(0))).norm() <= 1e-12);
    CHECK((v1 - poly.point(3)).norm() <= 1e-12);
    CHECK((d1 - 3.0 / T * (poly.point(3) - poly.point(2))).norm() <= 1e-12);
}

TEST_CASE("explicit cubic rejects other orders") {
    Eigen::MatrixXd p(3, 3);
    p.setRandom();
    Eigen::VectorXd a, b;
    CHECK_THROWS_AS(ControlPolygon(p, 1.0).eval_cubic(0.5, a, b), std::domain_error);
}

TEST_CASE("convex hull bounding box") {
    Rng rng(61);
    for (int trial = 0; trial < 30; ++trial) {
        const ControlPolygon poly = random_cubic(rng);
        const Eigen::VectorXd lo = poly.points().rowwise().minCoeff();
        const Eigen::VectorXd hi = poly.points().rowwise().maxCoeff();
        for (int k = 0; k <= 40; ++k) {
            const Eigen::VectorXd v =
                poly.eval(std::min(poly.duration(), poly.duration() * k / 40.0));
            for (int d = 0; d < 3; ++d) {
                CHECK(v[d] >= lo[d] - 1e-12);
                CHECK(v[d] <= hi[d] + 1e-12);
            }
        }
    }
}

TEST_CASE("time rescaling") {
    Rng rng(71);
    for (int trial = 0; trial < 30; ++trial) {
        Eigen::MatrixXd p(3, 4);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 4; ++j) p(i, j) = rng.uniform(-1.0, 1.0);
        const double T = rng.uniform(0.3, 4.0);
        const ControlPolygon scaled(p, T);
        const ControlPolygon unit(p, 1.0);
        const double t = rng.uniform(0.0, T);
        CHECK((scaled.eval(t) - unit.eval(t / T)).norm() <= 1e-12);
        CHECK((scaled.derivative().eval(t) - unit.derivative().eval(t / T) / T).norm() <= 1e-12);
    }
}

TEST_CASE("binomial recurrence stays exact for small n") {
    CHECK(bezier::binomial(10, 5) == 252.0);
    CHECK(bezier::binomial(30, 15) == 155117520.0);
    CHECK(bezier::binomial(7, 0) == 1.0);
    CHECK(bezier::binomial(7, 7) == 1.0);
}
