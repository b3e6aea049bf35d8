#include <doctest.h>

#include "trt/geometry.hpp"

#include <random>

using namespace trt;

namespace {

// independent finite-difference oracle for the Christoffel symbols, built
// from metric evaluations only
std::vector<Mat> christoffel_fd_oracle(const MetricField& field, const Vec& x, double step) {
    const int n = field.dim();
    std::vector<Mat> dg(n);
    for (int k = 0; k < n; ++k) {
        Vec xp = x, xm = x;
        xp[k] += step;
        xm[k] -= step;
        dg[k] = (field.metric(xp) - field.metric(xm)) / (2.0 * step);
    }
    const Mat ginv = field.metric(x).inverse();
    std::vector<Mat> gamma(n, Mat::Zero(n, n));
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int l = 0; l < n; ++l)
                    s += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
                gamma[k](i, j) = 0.5 * s;
            }
    return gamma;
}

Vec random_point(std::mt19937_64& rng, int n, double radius) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    while (true) {
        Vec x(n);
        for (int i = 0; i < n; ++i) x[i] = u(rng);
        if (x.norm() < 1.0) return radius * x;
    }
}

}  // namespace

TEST_CASE("domain classification and invariants") {
    Domain d(3, 1.0, 1.2);
    Vec x = Vec::Zero(3);
    CHECK(d.classify(x) == Region::Interior);
    x << 1.0, 0.0, 0.0;
    CHECK(d.classify(x) == Region::Boundary);
    x << 1.1, 0.0, 0.0;
    CHECK(d.classify(x) == Region::Exterior);
    CHECK_THROWS_AS(Domain(3, 1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(Domain(1, 1.0, 1.2), std::invalid_argument);
}

TEST_CASE("eval_metric on the shipped families") {
    Domain d(3, 1.0, 1.5);
    const MetricField euc = MetricField::euclidean(3);
    Vec x(3);
    x << 0.3, -0.2, 0.1;
    CHECK((eval_metric(euc, d, x) - Mat::Identity(3, 3)).norm() == 0.0);

    const MetricField conf = MetricField::conformal(3, 0.1);
    CHECK((eval_metric(conf, d, Vec::Zero(3)) - Mat::Identity(3, 3)).norm() == 0.0);
    x << 1.0, 0.0, 0.0;
    // c = 1 + 0.1 = 1.1, c^2 = 1.21
    CHECK((eval_metric(conf, d, x) - 1.21 * Mat::Identity(3, 3)).norm() < 1e-15);

    x << 2.0, 0.0, 0.0;
    CHECK_THROWS_AS(eval_metric(conf, d, x), std::domain_error);
}

TEST_CASE("metric symmetry and positive definiteness at random points") {
    Domain d(3, 1.0, 1.2);
    std::mt19937_64 rng(7);
    for (const auto& field :
         {MetricField::euclidean(3), MetricField::conformal(3, 0.05),
          MetricField::conformal(3, -0.15)}) {
        for (int i = 0; i < 1000; ++i) {
            const Vec x = random_point(rng, 3, 1.2);
            const Mat g = field.metric(x);
            CHECK((g - g.transpose()).norm() == 0.0);
            Eigen::SelfAdjointEigenSolver<Mat> es(g);
            CHECK(es.eigenvalues().minCoeff() > 0.0);
        }
    }
}

TEST_CASE("christoffel symbols: euclidean, symmetry, finite-difference oracle") {
    Domain d(3, 1.0, 1.2);
    const MetricField euc = MetricField::euclidean(3);
    std::mt19937_64 rng(11);
    const Vec x0 = random_point(rng, 3, 1.0);
    for (const Mat& g : eval_christoffel(euc, d, x0)) CHECK(g.norm() == 0.0);

    const MetricField conf = MetricField::conformal(3, 0.08);
    for (int i = 0; i < 50; ++i) {
        const Vec x = random_point(rng, 3, 1.1);
        const auto gamma = conf.christoffel(x);
        const auto oracle = christoffel_fd_oracle(conf, x, 1e-5 * d.rho);
        double scale = 0.0, err = 0.0;
        for (int k = 0; k < 3; ++k) {
            CHECK((gamma[k] - gamma[k].transpose()).norm() == 0.0);
            err = std::max(err, (gamma[k] - oracle[k]).cwiseAbs().maxCoeff());
            scale = std::max(scale, oracle[k].cwiseAbs().maxCoeff());
        }
        CHECK(err <= 1e-6 * std::max(1.0, scale));
    }
}

TEST_CASE("christoffel via custom metric without derivatives") {
    // same conformal metric fed through the custom hook; derivatives fall
    // back to internal finite differences
    const double a = 0.08;
    const MetricField conf = MetricField::conformal(3, a);
    const MetricField custom = MetricField::custom(3, [a](const Vec& x) -> Mat {
        const double c = 1.0 + a * x.squaredNorm();
        return c * c * Mat::Identity(3, 3);
    });
    Vec x(3);
    x << 0.4, -0.3, 0.5;
    const auto g1 = conf.christoffel(x);
    const auto g2 = custom.christoffel(x);
    for (int k = 0; k < 3; ++k) CHECK((g1[k] - g2[k]).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("inner products") {
    Domain d(3, 1.0, 1.5);
    const MetricField euc = MetricField::euclidean(3);
    Vec x = Vec::Zero(3), e1 = Vec::Unit(3, 0), e2 = Vec::Unit(3, 1);
    CHECK(inner_product(euc, d, x, e1, e2) == 0.0);
    Vec u(3);
    u << 0.3, -1.2, 0.5;
    CHECK(inner_product(euc, d, x, u, u) == doctest::Approx(u.squaredNorm()));

    // conformal with c = 1.1 at x: <e1, e1> = 1.21
    const MetricField conf = MetricField::conformal(3, 0.1);
    x << 1.0, 0.0, 0.0;
    CHECK(inner_product(conf, d, x, e1, e1) == doctest::Approx(1.21));

    std::mt19937_64 rng(3);
    for (int i = 0; i < 100; ++i) {
        const Vec p = random_point(rng, 3, 1.2);
        const Vec a = random_point(rng, 3, 1.0), b = random_point(rng, 3, 1.0);
        CHECK(conf.inner(p, a, b) == doctest::Approx(conf.inner(p, b, a)).epsilon(1e-15));
    }
}

TEST_CASE("boundary convexity check") {
    Domain d(3, 1.0, 1.2);
    const auto euc = check_boundary_convexity(MetricField::euclidean(3), d, 100);
    CHECK(euc.pass);
    // round sphere of radius 1 has second fundamental form exactly 1
    CHECK(euc.min_value == doctest::Approx(1.0).epsilon(1e-4));

    const auto conf = check_boundary_convexity(MetricField::conformal(3, 0.05), d, 100);
    CHECK(conf.pass);
    CHECK(conf.min_value > 0.0);

    const auto single = check_boundary_convexity(MetricField::euclidean(3), d, 1);
    CHECK(single.samples == 1);
    CHECK(single.pass);

    CHECK_THROWS_AS(check_boundary_convexity(MetricField::euclidean(3), d, 0),
                    std::invalid_argument);
}

TEST_CASE("gs_complete produces g-orthonormal bases") {
    const MetricField conf = MetricField::conformal(3, 0.07);
    Vec x(3);
    x << 0.2, 0.5, -0.1;
    Vec v(3);
    v << 0.6, 0.0, 0.8;
    const auto basis = gs_complete(conf, x, {v});
    REQUIRE(basis.size() == 3);
    for (size_t i = 0; i < basis.size(); ++i)
        for (size_t j = 0; j < basis.size(); ++j)
            CHECK(conf.inner(x, basis[i], basis[j]) ==
                  doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
    // first vector spans the fixed direction
    CHECK(std::abs(conf.inner(x, basis[0], v)) > 0.0);
}
