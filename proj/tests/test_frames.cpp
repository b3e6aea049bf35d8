#include <doctest.h>

#include "trt/frames.hpp"
#include "trt/geodesics.hpp"

#include <random>

using namespace trt;

TEST_CASE("theta_of_xi: displayed identities") {
    for (int n : {3, 4, 5}) {
        Vec xi = Vec::Zero(n);
        xi[n - 2] = 1.0;
        const Vec theta = theta_of_xi(xi);
        Vec en = Vec::Zero(n);
        en[n - 1] = 1.0;
        CHECK((theta - en).norm() == 0.0);
    }

    // n = 3, xi = (0.1, 1, 0) -> theta = (0.1, -0.01, 1)
    Vec xi(3);
    xi << 0.1, 1.0, 0.0;
    const Vec theta = theta_of_xi(xi);
    CHECK(theta[0] == doctest::Approx(0.1));
    CHECK(theta[1] == doctest::Approx(-0.01));
    CHECK(theta[2] == 1.0);
    CHECK(std::abs(theta.dot(xi)) < 1e-15);

    std::mt19937_64 rng(31);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 3 + trial % 3;
        Vec x = Vec::Zero(n);
        x[n - 2] = 1.0;
        Vec noise(n);
        for (int i = 0; i < n; ++i) noise[i] = g(rng);
        x += 0.1 * noise.normalized() * (0.99 * (trial % 97) / 97.0);
        const Vec th = theta_of_xi(x);
        CHECK(std::abs(th.dot(x)) < 1e-14);
        CHECK(th[n - 1] == 1.0);
    }

    Vec bad(3);
    bad << 0.2, 0.0, 1.0;
    CHECK_THROWS_AS(theta_of_xi(bad), std::invalid_argument);
}

TEST_CASE("gram_schmidt_frame") {
    const MetricField euc = MetricField::euclidean(3);
    const Vec x = Vec::Zero(3);

    // already orthonormal seeds are returned unchanged
    const auto id_frame =
        gram_schmidt_frame(euc, x, Vec::Unit(3, 2), {Vec::Unit(3, 0), Vec::Unit(3, 1)});
    REQUIRE(id_frame.size() == 2);
    CHECK((id_frame[0] - Vec::Unit(3, 0)).norm() == 0.0);
    CHECK((id_frame[1] - Vec::Unit(3, 1)).norm() == 0.0);

    Vec theta(3);
    theta << 0.6, 0.0, 0.8;
    const auto fr = gram_schmidt_frame(euc, x, theta);
    REQUIRE(fr.size() == 2);
    CHECK(std::abs(fr[0].dot(theta)) < 1e-10);
    CHECK(std::abs(fr[1].dot(theta)) < 1e-10);
    CHECK(std::abs(fr[0].dot(fr[1])) < 1e-10);
    CHECK(fr[0].norm() == doctest::Approx(1.0).epsilon(1e-12));

    // curved metric: orthonormality holds in g, not in the dot product
    const MetricField conf = MetricField::conformal(3, 0.2);
    Vec p(3);
    p << 0.4, -0.2, 0.3;
    const auto gfr = gram_schmidt_frame(conf, p, theta);
    for (int i = 0; i < 2; ++i) {
        CHECK(conf.inner(p, gfr[i], conf.normalized(p, theta)) ==
              doctest::Approx(0.0).epsilon(1e-8));
        for (int j = 0; j < 2; ++j)
            CHECK(conf.inner(p, gfr[i], gfr[j]) ==
                  doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-8));
        CHECK(std::abs(gfr[i].dot(gfr[i]) - 1.0) > 1e-3);  // not Euclidean-normalized
    }
}

TEST_CASE("spanning set: counts, witnesses, rank") {
    for (int n : {3, 4, 5}) {
        const SpanningSet set = build_spanning_set(n);
        CHECK(set.count() == n * (n + 1) / 2);
        CHECK(set.rank() == set.count());
        CHECK(set.gram_eigs.minCoeff() > 0.0);
        for (const auto& m : set.members) {
            CHECK(m.eta.norm() == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(std::abs(m.witness.dot(m.eta)) < 1e-10);
            CHECK(std::abs(m.witness.dot(set.xi0)) < 1e-10);
            CHECK((m.witness - set.theta0).norm() <= set.delta_theta + 1e-12);
        }
    }
}

TEST_CASE("spanning set: case-3 witness pairing vanishes for the produced coefficients") {
    const SpanningSet set = build_spanning_set(3);
    bool saw_case3 = false;
    for (const auto& m : set.members) {
        if (m.case_id != 3) continue;
        saw_case3 = true;
        // rebuild the unnormalized combination from the base members
        const Vec combo = m.a_p * set.members[m.p].eta + m.a_q * set.members[m.q].eta;
        const Vec wit = set.members[m.p].witness + set.eps * set.members[m.q].witness;
        CHECK(std::abs(wit.dot(combo)) < 1e-12);
    }
    CHECK(saw_case3);
}

TEST_CASE("spanning set in general position") {
    Vec theta0(4), xi0(4);
    theta0 << 0.3, -0.5, 0.2, 0.7;
    xi0 << 0.7, 0.3, -0.1, 0.0;
    xi0 -= theta0.normalized().dot(xi0) * theta0.normalized();
    const SpanningSet set = build_spanning_set(4, theta0, xi0);
    CHECK(set.count() == 10);
    CHECK(set.rank() == 10);
    for (const auto& m : set.members) {
        CHECK(std::abs(m.witness.dot(m.eta)) < 1e-10);
        CHECK(std::abs(m.witness.dot(set.xi0)) < 1e-10);
        CHECK((m.witness - set.theta0).norm() <= set.delta_theta + 1e-12);
    }
}

TEST_CASE("spanning set: eps halving against a tight neighborhood") {
    const SpanningSet set = build_spanning_set(3, 0.02, 0.1);
    CHECK(set.eps < 0.1);
    for (const auto& m : set.members)
        CHECK((m.witness - set.theta0).norm() <= 0.02 + 1e-12);
    CHECK_THROWS_AS(build_spanning_set(3, 1e-9, 0.1), std::runtime_error);
}

TEST_CASE("tensor recovery from quadratic values") {
    const SpanningSet set = build_spanning_set(3);
    const int N = set.count();

    // zero data -> zero tensor
    CHECK(recover_tensor_from_quadratic_values(set, Vec::Zero(N)).norm() == 0.0);

    // unit members: identity gives values all one
    CHECK((recover_tensor_from_quadratic_values(set, Vec::Ones(N)) - Mat::Identity(3, 3))
              .cwiseAbs()
              .maxCoeff() < 1e-12);

    std::mt19937_64 rng(41);
    std::normal_distribution<double> g(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        Mat f(3, 3);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) f(i, j) = g(rng);
        f = (0.5 * (f + f.transpose())).eval();
        Vec values(N);
        for (int k = 0; k < N; ++k) values[k] = set.members[k].eta.dot(f * set.members[k].eta);
        const Mat rec = recover_tensor_from_quadratic_values(set, values);
        worst = std::max(worst, (rec - f).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("smooth-dependence proxies for the analytic maps") {
    // directional derivative of xi -> theta(xi) is step-size stable
    Vec xi(3);
    xi << 0.03, 1.0, -0.02;
    Vec dir(3);
    dir << 1.0, 0.5, -0.3;
    dir.normalize();
    auto deriv = [&](double step) {
        return ((theta_of_xi(xi + step * dir) - theta_of_xi(xi - step * dir)) / (2.0 * step))
            .norm();
    };
    const double d4 = deriv(1e-4), d5 = deriv(1e-5);
    CHECK(std::abs(d4 - d5) / d5 < 0.05);

    // transported vector depends smoothly on the initial direction
    const Domain dom(3, 1.0, 1.2);
    const MetricField conf = MetricField::conformal(3, 0.1);
    Vec x0(3);
    x0 << 0.0, -1.2, 0.0;
    Vec theta(3);
    theta << 0.1, 1.0, 0.05;
    Vec eta0(3);
    eta0 << 1.0, 0.0, 0.2;
    auto transported_end = [&](double s) {
        Vec th = theta;
        th[0] += s;
        const GeodesicPath p = shoot_geodesic(conf, dom, x0, th, 1e-3);
        const TransportedVector tv = parallel_transport(conf, p, eta0);
        return transported_at(conf, p, tv, std::min(2.0, p.exit_time()));
    };
    auto fd = [&](double step) {
        return ((transported_end(step) - transported_end(-step)) / (2.0 * step)).norm();
    };
    const double t4 = fd(1e-4), t5 = fd(1e-5);
    CHECK(std::abs(t4 - t5) / t5 < 0.05);
}
