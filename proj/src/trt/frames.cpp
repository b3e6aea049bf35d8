#include "trt/frames.hpp"

#include <cmath>
#include <stdexcept>

namespace trt {

Vec theta_of_xi(const Vec& xi) {
    const int n = static_cast<int>(xi.size());
    if (n < 2) throw std::invalid_argument("theta_of_xi: dimension must be >= 2");
    if (xi[n - 2] == 0.0)
        throw std::invalid_argument("theta_of_xi: xi_{n-1} = 0 is singular for the map");
    Vec theta(n);
    double head = 0.0;
    for (int i = 0; i + 2 < n; ++i) {
        theta[i] = xi[i];
        head += xi[i] * xi[i];
    }
    theta[n - 2] = -(head + xi[n - 1]) / xi[n - 2];
    theta[n - 1] = 1.0;
    return theta;
}

std::vector<Vec> gram_schmidt_frame(const MetricField& field, const Vec& x, const Vec& theta,
                                    const std::vector<Vec>& seeds) {
    const Vec that = field.normalized(x, theta);
    auto basis = gs_complete(field, x, {that}, seeds);
    return {basis.begin() + 1, basis.end()};
}

int sym_component_count(int n) { return n * (n + 1) / 2; }

Vec sym_to_vec(const Mat& m) {
    const int n = static_cast<int>(m.rows());
    Vec v(sym_component_count(n));
    int idx = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) v[idx++] = m(i, j);
    return v;
}

Mat vec_to_sym(int n, const Vec& v) {
    Mat m(n, n);
    int idx = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            m(i, j) = v[idx];
            m(j, i) = v[idx];
            ++idx;
        }
    return m;
}

Vec quadratic_row(const Vec& eta) {
    const int n = static_cast<int>(eta.size());
    Vec r(sym_component_count(n));
    int idx = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) r[idx++] = (i == j ? 1.0 : 2.0) * eta[i] * eta[j];
    return r;
}

int SpanningSet::rank() const {
    if (gram_eigs.size() == 0) return 0;
    const double cutoff = gram_eigs.maxCoeff() * 1e-12;
    int r = 0;
    for (int i = 0; i < gram_eigs.size(); ++i)
        if (gram_eigs[i] > cutoff) ++r;
    return r;
}

namespace {

constexpr double kZeroPairing = 1e-12;

// Single construction attempt in the canonical frame for a given eps.
// Returns false when a composite witness leaves the delta neighborhood.
bool build_canonical(int n, double delta_theta, double eps, std::vector<SpanningMember>& out) {
    out.clear();
    Vec theta0 = Vec::Zero(n);
    theta0[n - 1] = 1.0;

    auto unit = [](Vec v) { return Vec(v / v.norm()); };
    auto near_theta0 = [&](const Vec& w) { return (w - theta0).norm() <= delta_theta; };

    // base members eta_i = e_i with witness theta0, then eta_n = e_1 - eps e_n
    // paired with the witness eps e_1 + e_n
    std::vector<Vec> base, base_witness;
    for (int i = 0; i + 1 < n; ++i) {
        Vec e = Vec::Zero(n);
        e[i] = 1.0;
        base.push_back(e);
        base_witness.push_back(theta0);
        out.push_back({e, theta0, 1.0, 0.0, -1, -1, 0});
    }
    {
        Vec eta = Vec::Zero(n), wit = Vec::Zero(n);
        eta[0] = 1.0;
        eta[n - 1] = -eps;
        wit[0] = eps;
        wit[n - 1] = 1.0;
        eta = unit(eta);
        wit = unit(wit);
        if (!near_theta0(wit)) return false;
        base.push_back(eta);
        base_witness.push_back(wit);
        out.push_back({eta, wit, 1.0, 0.0, -1, -1, 0});
    }

    // composite members for every pair p < q
    for (int p = 0; p < n; ++p) {
        for (int q = p + 1; q < n; ++q) {
            const Vec &tp = base_witness[p], &tq = base_witness[q];
            const Vec &ep = base[p], &eq = base[q];
            const double tq_ep = tq.dot(ep);
            const double tp_eq = tp.dot(eq);
            SpanningMember m;
            m.p = p;
            m.q = q;
            if (std::abs(tq_ep) < kZeroPairing && std::abs(tp_eq) < kZeroPairing) {
                m.case_id = 1;
                m.a_p = 1.0;
                m.a_q = 1.0;
                m.eta = unit(ep + eq);
                m.witness = tp;
            } else if (std::abs(tq_ep) < kZeroPairing || std::abs(tp_eq) < kZeroPairing) {
                m.case_id = 2;
                m.a_p = 1.0;
                m.a_q = 1.0;
                m.eta = unit(ep + eq);
                m.witness = std::abs(tq_ep) < kZeroPairing ? tq : tp;
            } else {
                // both pairings nonzero: combine with witness theta_p + eps theta_q.
                // The coefficient cancelling the pairing is
                //   a_q = -eps <theta_q, eta_p> / <theta_p, eta_q>.
                m.case_id = 3;
                m.a_p = 1.0;
                m.a_q = -eps * tq_ep / tp_eq;
                m.eta = unit(m.a_p * ep + m.a_q * eq);
                m.witness = unit(tp + eps * tq);
                if (!near_theta0(m.witness)) return false;
            }
            out.push_back(std::move(m));
        }
    }
    return true;
}

}  // namespace

SpanningSet build_spanning_set(int n, const Vec& theta0, const Vec& xi0, double delta_theta,
                               double eps) {
    if (n < 3) throw std::invalid_argument("build_spanning_set: requires n >= 3");
    if (static_cast<int>(theta0.size()) != n || static_cast<int>(xi0.size()) != n)
        throw std::invalid_argument("build_spanning_set: dimension mismatch");
    if (std::abs(theta0.normalized().dot(xi0.normalized())) > 1e-10)
        throw std::invalid_argument("build_spanning_set: theta0 must be orthogonal to xi0");

    std::vector<SpanningMember> members;
    double eps_used = eps;
    while (true) {
        if (build_canonical(n, delta_theta, eps_used, members)) break;
        eps_used *= 0.5;
        if (eps_used < 1e-8)
            throw std::runtime_error(
                "build_spanning_set: eps underflow while keeping witnesses inside the "
                "neighborhood of theta0");
    }

    // orthogonal transform taking (e_{n-1}, e_n) to (xi0_hat, theta0_hat)
    Mat rot = Mat::Identity(n, n);
    {
        const Vec that = theta0.normalized();
        Vec xhat = xi0 - xi0.dot(that) * that;
        xhat.normalize();
        Mat basis(n, n);
        basis.col(n - 1) = that;
        basis.col(n - 2) = xhat;
        int filled = 0;
        for (int k = 0; k < n && filled < n - 2; ++k) {
            Vec e = Vec::Zero(n);
            e[k] = 1.0;
            e -= that.dot(e) * that;
            e -= xhat.dot(e) * xhat;
            for (int c = 0; c < filled; ++c) e -= basis.col(c).dot(e) * basis.col(c);
            if (e.norm() > 1e-8) basis.col(filled++) = e / e.norm();
        }
        if (filled != n - 2)
            throw std::runtime_error("build_spanning_set: failed to complete the rotation basis");
        rot = basis;
    }

    SpanningSet set;
    set.n = n;
    set.theta0 = theta0.normalized();
    set.xi0 = xi0.normalized();
    set.eps = eps_used;
    set.delta_theta = delta_theta;
    set.members = std::move(members);
    for (auto& m : set.members) {
        m.eta = rot * m.eta;
        m.witness = rot * m.witness;
    }

    const int N = set.count();
    set.gram.resize(N, N);
    set.quad.resize(N, sym_component_count(n));
    for (int k = 0; k < N; ++k) {
        for (int l = 0; l < N; ++l) {
            const double d = set.members[k].eta.dot(set.members[l].eta);
            set.gram(k, l) = d * d;
        }
        set.quad.row(k) = quadratic_row(set.members[k].eta).transpose();
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(set.gram);
    set.gram_eigs = es.eigenvalues();
    return set;
}

SpanningSet build_spanning_set(int n, double delta_theta, double eps) {
    Vec theta0 = Vec::Zero(n), xi0 = Vec::Zero(n);
    theta0[n - 1] = 1.0;
    xi0[n - 2] = 1.0;
    return build_spanning_set(n, theta0, xi0, delta_theta, eps);
}

Mat recover_tensor_from_quadratic_values(const SpanningSet& spanning, const Vec& values) {
    const int N = spanning.count();
    if (static_cast<int>(values.size()) != N)
        throw std::invalid_argument("recover_tensor_from_quadratic_values: need N values");
    Eigen::JacobiSVD<Mat> svd(spanning.quad, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double cond = svd.singularValues()(0) / svd.singularValues()(N - 1);
    if (!(cond < 1e12))
        throw std::runtime_error(
            "recover_tensor_from_quadratic_values: system condition number " +
            std::to_string(cond) + " exceeds 1e12");
    const Vec f = svd.solve(values);
    return vec_to_sym(spanning.n, f);
}

}  // namespace trt
