#include "trt/geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace trt {

Domain::Domain(int n_, double rho_, double rho_ext_) : n(n_), rho(rho_), rho_ext(rho_ext_) {
    if (n < 2) throw std::invalid_argument("Domain: dimension must be >= 2");
    if (!(rho > 0.0)) throw std::invalid_argument("Domain: rho must be positive");
    if (!(rho_ext > rho)) throw std::invalid_argument("Domain: rho_ext must exceed rho");
}

Region Domain::classify(const Vec& x) const {
    const double bx = b(x);
    if (std::abs(bx) <= boundary_tol()) return Region::Boundary;
    return bx < 0.0 ? Region::Interior : Region::Exterior;
}

MetricField MetricField::euclidean(int n) {
    MetricField m(n, Kind::Euclidean);
    return m;
}

MetricField MetricField::conformal(int n, double a) {
    MetricField m(n, Kind::Conformal);
    m.a_ = a;
    return m;
}

MetricField MetricField::custom(int n, ComponentFn g, DerivativeFn dg, double fd_step) {
    if (!g) throw std::invalid_argument("MetricField::custom: component evaluator required");
    MetricField m(n, Kind::Custom);
    m.g_fn_ = std::move(g);
    m.dg_fn_ = std::move(dg);
    m.fd_step_ = fd_step;
    return m;
}

Mat MetricField::metric(const Vec& x) const {
    switch (kind_) {
        case Kind::Euclidean:
            return Mat::Identity(n_, n_);
        case Kind::Conformal: {
            const double c = 1.0 + a_ * x.squaredNorm();
            return (c * c) * Mat::Identity(n_, n_);
        }
        case Kind::Custom: {
            Mat g = g_fn_(x);
            // symmetry is part of the contract; enforce it exactly
            return 0.5 * (g + g.transpose());
        }
    }
    return Mat::Identity(n_, n_);
}

Mat MetricField::inverse_metric(const Vec& x) const {
    switch (kind_) {
        case Kind::Euclidean:
            return Mat::Identity(n_, n_);
        case Kind::Conformal: {
            const double c = 1.0 + a_ * x.squaredNorm();
            return (1.0 / (c * c)) * Mat::Identity(n_, n_);
        }
        case Kind::Custom: {
            Mat g = metric(x);
            Eigen::LLT<Mat> llt(g);
            if (llt.info() != Eigen::Success) {
                Eigen::SelfAdjointEigenSolver<Mat> es(g);
                throw std::runtime_error(
                    "MetricField: singular metric, smallest eigenvalue = " +
                    std::to_string(es.eigenvalues().minCoeff()));
            }
            return llt.solve(Mat::Identity(n_, n_));
        }
    }
    return Mat::Identity(n_, n_);
}

std::vector<Mat> MetricField::metric_derivative(const Vec& x) const {
    std::vector<Mat> dg(n_, Mat::Zero(n_, n_));
    switch (kind_) {
        case Kind::Euclidean:
            break;
        case Kind::Conformal: {
            // g_ij = c^2 delta_ij with c = 1 + a|x|^2, so d_k g_ij = 4 a c x_k delta_ij
            const double c = 1.0 + a_ * x.squaredNorm();
            for (int k = 0; k < n_; ++k)
                dg[k] = (4.0 * a_ * c * x[k]) * Mat::Identity(n_, n_);
            break;
        }
        case Kind::Custom: {
            if (dg_fn_) {
                dg = dg_fn_(x);
                for (auto& m : dg) m = 0.5 * (m + m.transpose());
            } else {
                const double h = fd_step_;
                for (int k = 0; k < n_; ++k) {
                    Vec xp = x, xm = x;
                    xp[k] += h;
                    xm[k] -= h;
                    dg[k] = (metric(xp) - metric(xm)) / (2.0 * h);
                }
            }
            break;
        }
    }
    return dg;
}

std::vector<Mat> MetricField::christoffel(const Vec& x) const {
    std::vector<Mat> gamma(n_, Mat::Zero(n_, n_));
    if (kind_ == Kind::Euclidean) return gamma;

    const Mat ginv = inverse_metric(x);
    const std::vector<Mat> dg = metric_derivative(x);
    // Gamma^k_ij = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)
    for (int k = 0; k < n_; ++k) {
        for (int i = 0; i < n_; ++i) {
            for (int j = i; j < n_; ++j) {
                double s = 0.0;
                for (int l = 0; l < n_; ++l)
                    s += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
                gamma[k](i, j) = 0.5 * s;
                gamma[k](j, i) = gamma[k](i, j);
            }
        }
    }
    return gamma;
}

double MetricField::inner(const Vec& x, const Vec& u, const Vec& v) const {
    switch (kind_) {
        case Kind::Euclidean:
            return u.dot(v);
        case Kind::Conformal: {
            const double c = 1.0 + a_ * x.squaredNorm();
            return c * c * u.dot(v);
        }
        case Kind::Custom:
            return u.dot(metric(x) * v);
    }
    return u.dot(v);
}

Vec MetricField::normalized(const Vec& x, const Vec& u) const {
    const double s = norm(x, u);
    if (!(s > 0.0)) throw std::invalid_argument("MetricField: cannot normalize zero vector");
    return u / s;
}

namespace {

void require_inside(const Domain& domain, const Vec& x, const char* op) {
    if (static_cast<int>(x.size()) != domain.n)
        throw std::invalid_argument(std::string(op) + ": point dimension mismatch");
    if (domain.b_ext(x) > domain.boundary_tol())
        throw std::domain_error(std::string(op) + ": point outside the outer ball");
}

}  // namespace

Mat eval_metric(const MetricField& field, const Domain& domain, const Vec& x) {
    require_inside(domain, x, "eval_metric");
    return field.metric(x);
}

std::vector<Mat> eval_christoffel(const MetricField& field, const Domain& domain, const Vec& x) {
    require_inside(domain, x, "eval_christoffel");
    return field.christoffel(x);
}

double inner_product(const MetricField& field, const Domain& domain, const Vec& x,
                     const Vec& u, const Vec& v) {
    require_inside(domain, x, "inner_product");
    return field.inner(x, u, v);
}

double halton(int index, int base) {
    double f = 1.0, r = 0.0;
    for (int i = index; i > 0; i /= base) {
        f /= base;
        r += f * (i % base);
    }
    return r;
}

double inverse_normal_cdf(double u) {
    // Acklam's rational approximation, sufficient for sampling
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1 - plow;
    double q, r;
    if (u < plow) {
        q = std::sqrt(-2 * std::log(u));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    if (u > phigh) {
        q = std::sqrt(-2 * std::log(1 - u));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    q = u - 0.5;
    r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
}

std::vector<Vec> sphere_points(int n, int count) {
    std::vector<Vec> pts;
    pts.reserve(count);
    if (n == 2) {
        for (int i = 0; i < count; ++i) {
            const double a = 2.0 * std::numbers::pi * (i + 0.5) / count;
            Vec p(2);
            p << std::cos(a), std::sin(a);
            pts.push_back(p);
        }
        return pts;
    }
    if (n == 3) {
        // Fibonacci sphere
        const double ga = std::numbers::pi * (3.0 - std::sqrt(5.0));
        for (int i = 0; i < count; ++i) {
            const double z = 1.0 - 2.0 * (i + 0.5) / count;
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double a = ga * i;
            Vec p(3);
            p << r * std::cos(a), r * std::sin(a), z;
            pts.push_back(p);
        }
        return pts;
    }
    // Higher dimensions: Halton points mapped through the inverse normal CDF
    // and normalized. Deterministic and quasi-uniform.
    static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
    for (int i = 0; i < count; ++i) {
        Vec p(n);
        for (int k = 0; k < n; ++k) p[k] = inverse_normal_cdf(halton(i + 1, primes[k % 8]));
        double s = p.norm();
        if (s == 0.0) {
            p.setZero();
            p[0] = 1.0;
            s = 1.0;
        }
        pts.push_back(p / s);
    }
    return pts;
}

std::vector<Vec> gs_complete(const MetricField& field, const Vec& x,
                             const std::vector<Vec>& fixed, const std::vector<Vec>& seeds) {
    const int n = field.dim();
    std::vector<Vec> basis;
    basis.reserve(n);

    auto project_off = [&](Vec v) {
        for (const Vec& b : basis) v -= field.inner(x, b, v) * b;
        return v;
    };

    for (const Vec& f : fixed) {
        Vec v = project_off(f);
        const double s = field.norm(x, v);
        if (s < 1e-12)
            throw std::invalid_argument("gs_complete: fixed vectors are dependent");
        basis.push_back(v / s);
    }

    std::vector<Vec> pool = seeds;
    for (int k = 0; k < n; ++k) {
        Vec e = Vec::Zero(n);
        e[k] = 1.0;
        pool.push_back(e);
    }
    for (const Vec& cand : pool) {
        if (static_cast<int>(basis.size()) == n) break;
        if (static_cast<int>(cand.size()) != n)
            throw std::invalid_argument("gs_complete: seed dimension mismatch");
        Vec v = project_off(cand);
        const double s = field.norm(x, v);
        // residual below threshold: seed is (nearly) inside the current span
        if (s < 1e-10 * std::max(1.0, field.norm(x, cand))) continue;
        basis.push_back(v / s);
    }
    if (static_cast<int>(basis.size()) != n)
        throw std::runtime_error("gs_complete: could not complete a basis from the given seeds");
    return basis;
}

Vec outward_normal(const MetricField& field, const Vec& x) {
    // grad b raised with g^{-1}: (grad b)^i = g^{ij} * 2 x_j
    Vec grad = 2.0 * x;
    Vec raised = field.inverse_metric(x) * grad;
    return field.normalized(x, raised);
}

ConvexityReport check_boundary_convexity(const MetricField& field, const Domain& domain,
                                         int sample_count) {
    if (sample_count < 1)
        throw std::invalid_argument("check_boundary_convexity: sample_count must be >= 1");
    const int n = domain.n;
    // spread samples over boundary points, cycling tangent directions per point
    const int n_tangent = std::max(1, n - 1);
    const int n_points = std::max(1, (sample_count + n_tangent - 1) / n_tangent);
    std::vector<Vec> pts = sphere_points(n, n_points);

    ConvexityReport rep;
    rep.min_value = std::numeric_limits<double>::infinity();
    const double fd = 1e-6 * domain.rho;

    auto nu = [&](const Vec& y) { return outward_normal(field, y); };

    int taken = 0;
    for (const Vec& p : pts) {
        if (taken >= sample_count) break;
        const Vec x = domain.rho * p;
        const Vec nx = nu(x);
        // g-orthonormal tangent frame at x
        std::vector<Vec> frame = gs_complete(field, x, {nx});
        for (int t = 1; t < n && taken < sample_count; ++t, ++taken) {
            const Vec& xi = frame[t];
            // covariant derivative of nu along xi: xi^i d_i nu^k + Gamma^k_ij xi^i nu^j
            Vec dnu = Vec::Zero(n);
            for (int i = 0; i < n; ++i) {
                Vec xp = x, xm = x;
                xp[i] += fd;
                xm[i] -= fd;
                dnu += xi[i] * (nu(xp) - nu(xm)) / (2.0 * fd);
            }
            const auto gamma = field.christoffel(x);
            for (int k = 0; k < n; ++k) dnu[k] += xi.dot(gamma[k] * nx);
            const double ii = field.inner(x, dnu, xi);
            if (ii < rep.min_value) {
                rep.min_value = ii;
                rep.worst_point = x;
                rep.worst_tangent = xi;
            }
        }
    }
    rep.samples = taken;
    rep.pass = rep.min_value > 0.0;
    return rep;
}

}  // namespace trt
