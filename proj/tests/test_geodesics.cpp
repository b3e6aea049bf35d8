#include <doctest.h>

#include "trt/geodesics.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace trt;

namespace {

Vec unit_random(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = g(rng);
    return v.normalized();
}

}  // namespace

TEST_CASE("euclidean geodesics are straight chords") {
    const Domain d(3, 1.0, 1.2);
    const MetricField euc = MetricField::euclidean(3);
    Vec x0(3);
    x0 << -1.2, 0.0, 0.0;
    Vec dir = Vec::Unit(3, 0);
    const GeodesicPath path = shoot_geodesic(euc, d, x0, dir, 1e-3);

    // exit at the antipodal chord end
    const Vec exit = path.samples.back().z;
    Vec expected(3);
    expected << 1.2, 0.0, 0.0;
    CHECK((exit - expected).norm() < 1e-8);
    CHECK(path.exit_time() == doctest::Approx(2.4).epsilon(1e-9));

    // entry/exit through M
    REQUIRE(path.meets_M);
    CHECK(path.t_enter == doctest::Approx(0.2).epsilon(1e-9));
    CHECK(path.t_exit == doctest::Approx(2.2).epsilon(1e-9));

    // straight-line property z = x0 + t theta at stored samples
    double worst = 0.0;
    for (const auto& s : path.samples)
        worst = std::max(worst, (s.z - (x0 + s.t * dir)).norm());
    CHECK(worst < 1e-10);
}

TEST_CASE("geodesic flow conserves speed") {
    const Domain d(3, 1.0, 1.2);
    std::mt19937_64 rng(5);
    for (const auto& field :
         {MetricField::euclidean(3), MetricField::conformal(3, 0.08)}) {
        for (int trial = 0; trial < 5; ++trial) {
            const Vec u = unit_random(rng, 3);
            const Vec x0 = d.rho_ext * u;
            Vec dir = -u + 0.3 * unit_random(rng, 3);
            const GeodesicPath path = shoot_geodesic(field, d, x0, dir, 1e-3);
            double worst = 0.0;
            for (const auto& s : path.samples)
                worst = std::max(worst, std::abs(field.norm(s.z, s.zeta) - 1.0));
            CHECK(worst < 1e-8);
        }
    }
}

TEST_CASE("observed RK4 convergence order") {
    const Domain d(3, 1.0, 1.2);
    const MetricField conf = MetricField::conformal(3, 0.15);
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 6; ++trial) {
        const Vec u = unit_random(rng, 3);
        const Vec x0 = d.rho_ext * u;
        Vec dir = (-u + 0.2 * unit_random(rng, 3)).normalized();
        const double T = 1.6;
        const double h = 4e-3;
        const Vec ref = integrate_fixed(conf, x0, dir, h / 8.0, T).z;
        const double e1 = (integrate_fixed(conf, x0, dir, h, T).z - ref).norm();
        const double e2 = (integrate_fixed(conf, x0, dir, h / 2.0, T).z - ref).norm();
        const double ratio = e1 / e2;
        CHECK(ratio > 12.0);
        CHECK(ratio < 20.0);
    }
}

TEST_CASE("halving h shrinks the endpoint error by about 2^4") {
    const Domain d(3, 1.0, 1.2);
    const MetricField conf = MetricField::conformal(3, 0.1);
    Vec x0(3), dir(3);
    x0 << 0.0, 0.0, -1.2;
    dir << 0.25, 0.1, 1.0;
    const double T = 2.0, h = 2e-3;
    const Vec ref = integrate_fixed(conf, x0, dir, h / 8.0, T).z;
    const double e1 = (integrate_fixed(conf, x0, dir, h, T).z - ref).norm();
    const double e2 = (integrate_fixed(conf, x0, dir, h / 2.0, T).z - ref).norm();
    CHECK(e1 / e2 > 12.0);
    CHECK(e1 / e2 < 20.0);
}

TEST_CASE("shoot_geodesic rejects bad arguments") {
    const Domain d(3, 1.0, 1.2);
    const MetricField euc = MetricField::euclidean(3);
    Vec x0 = Vec::Zero(3);
    CHECK_THROWS_AS(shoot_geodesic(euc, d, x0, Vec::Unit(3, 0), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(shoot_geodesic(euc, d, x0, Vec::Unit(2, 0), 1e-3), std::invalid_argument);
    Vec outside(3);
    outside << 1.3, 0.0, 0.0;
    CHECK_THROWS_AS(shoot_geodesic(euc, d, outside, Vec::Unit(3, 0), 1e-3), std::domain_error);
}

TEST_CASE("parallel transport: euclidean constancy and g-isometry") {
    const Domain d(3, 1.0, 1.2);
    const MetricField euc = MetricField::euclidean(3);
    Vec x0(3);
    x0 << -1.2, 0.0, 0.0;
    const GeodesicPath path = shoot_geodesic(euc, d, x0, Vec::Unit(3, 0), 1e-3);
    Vec eta0(3);
    eta0 << 0.0, 1.0, 2.0;
    const TransportedVector tv = parallel_transport(euc, path, eta0);
    for (const Vec& e : tv.eta) CHECK((e - eta0).norm() < 1e-12);

    const MetricField conf = MetricField::conformal(3, 0.08);
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 5; ++trial) {
        const Vec u = unit_random(rng, 3);
        const Vec start = d.rho_ext * u;
        const Vec dir = (-u + 0.25 * unit_random(rng, 3)).normalized();
        const GeodesicPath p = shoot_geodesic(conf, d, start, dir, 1e-3);
        Vec a = unit_random(rng, 3), b = unit_random(rng, 3);
        const TransportedVector ta = parallel_transport(conf, p, a);
        const TransportedVector tb = parallel_transport(conf, p, b);
        const double ip0 = conf.inner(start, a, b);
        double drift = 0.0;
        for (size_t i = 0; i < p.samples.size(); ++i)
            drift = std::max(drift,
                             std::abs(conf.inner(p.samples[i].z, ta.eta[i], tb.eta[i]) - ip0));
        CHECK(drift < 1e-8);
    }
}

TEST_CASE("transport keeps orthogonality to the velocity") {
    const Domain d(3, 1.0, 1.2);
    const MetricField conf = MetricField::conformal(3, 0.08);
    std::mt19937_64 rng(29);
    for (int trial = 0; trial < 5; ++trial) {
        const Vec u = unit_random(rng, 3);
        const Vec start = d.rho_ext * u;
        const Vec dir = (-u + 0.2 * unit_random(rng, 3)).normalized();
        const GeodesicPath p = shoot_geodesic(conf, d, start, dir, 1e-3);
        // project a random vector g-orthogonal to the initial velocity
        const Vec that = p.samples.front().zeta;
        Vec eta0 = unit_random(rng, 3);
        eta0 -= conf.inner(start, that, eta0) * that;
        const TransportedVector tv = parallel_transport(conf, p, eta0);
        double drift = 0.0;
        for (size_t i = 0; i < p.samples.size(); ++i)
            drift = std::max(drift,
                             std::abs(conf.inner(p.samples[i].z, tv.eta[i], p.samples[i].zeta)));
        CHECK(drift < 1e-7);
    }
}

TEST_CASE("transport round trip returns the initial vector") {
    const Domain d(3, 1.0, 1.2);
    const MetricField conf = MetricField::conformal(3, 0.1);
    Vec u(3);
    u << 0.0, -1.0, 0.0;
    const Vec start = d.rho_ext * u;
    Vec dir(3);
    dir << 0.2, 1.0, 0.15;
    const GeodesicPath p = shoot_geodesic(conf, d, start, dir, 1e-3);
    Vec eta0(3);
    eta0 << 0.7, 0.1, -0.4;
    const TransportedVector tv = parallel_transport(conf, p, eta0);

    // reverse geodesic from the exit state
    const PathState& end = p.samples.back();
    const GeodesicPath back = shoot_geodesic(conf, d, end.z, -end.zeta, 1e-3);
    const TransportedVector tb = parallel_transport(conf, back, tv.eta.back());
    const Vec eta_back = transported_at(conf, back, tb, back.exit_time());
    CHECK((eta_back - eta0).norm() < 1e-7);
}

TEST_CASE("dense output interpolation is consistent with stored samples") {
    const Domain d(3, 1.0, 1.2);
    const MetricField conf = MetricField::conformal(3, 0.1);
    Vec x0(3), dir(3);
    x0 << -1.19, 0.05, 0.0;
    dir << 1.0, 0.1, 0.05;
    const GeodesicPath p = shoot_geodesic(conf, d, x0, dir, 1e-3);
    // state midway between two samples agrees with a half-step integration
    const double t = p.samples[100].t + 0.5 * 1e-3;
    const PathState mid = geodesic_state_at(conf, p, t);
    const PathState ref = integrate_fixed(conf, x0, dir, 0.5e-3, t);
    CHECK((mid.z - ref.z).norm() < 1e-11);
    CHECK((mid.zeta - ref.zeta).norm() < 1e-11);
}

TEST_CASE("influx samples: signs, Santalo measure, refinement stability") {
    // unit extended sphere so the closed form is vol(S^2) * pi
    const Domain d(3, 0.8, 1.0);
    const MetricField euc = MetricField::euclidean(3);
    const auto samples = influx_samples(euc, d, 64, 32);
    double total = 0.0;
    for (const auto& s : samples) {
        CHECK(s.santalo > 0.0);
        // inward: <xi, nu> < 0 with nu the outward normal
        CHECK(s.xi.dot(s.x.normalized()) < 0.0);
        CHECK(std::abs(s.xi.norm() - 1.0) < 1e-12);
        total += s.weight * s.santalo;
    }
    const double closed_form = 4.0 * std::numbers::pi * std::numbers::pi;
    CHECK(std::abs(total - closed_form) / closed_form < 0.01);

    const auto fine = influx_samples(euc, d, 128, 64);
    double total_fine = 0.0;
    for (const auto& s : fine) total_fine += s.weight * s.santalo;
    CHECK(std::abs(total_fine - total) / closed_form < 0.005);

    CHECK_THROWS_AS(influx_samples(euc, d, 0, 4), std::invalid_argument);
}

TEST_CASE("sphere quadrature integrates constants and smooth functions") {
    for (int n : {2, 3, 4}) {
        const auto nodes = sphere_quadrature(n, 200);
        double total = 0.0, fn = 0.0;
        for (const auto& nd : nodes) {
            CHECK(std::abs(nd.dir.norm() - 1.0) < 1e-12);
            total += nd.weight;
            fn += nd.weight * nd.dir[0] * nd.dir[0];
        }
        const double vol = n == 2   ? 2.0 * std::numbers::pi
                           : n == 3 ? 4.0 * std::numbers::pi
                                    : 2.0 * std::numbers::pi * std::numbers::pi;
        CHECK(std::abs(total - vol) / vol < 1e-10);
        // int over S^{n-1} of x_1^2 = vol / n
        CHECK(std::abs(fn - vol / n) / vol < 1e-8);
    }
}
