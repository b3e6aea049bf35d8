#pragma once
// Ball domains with an analytic extension and analytic Riemannian metrics.
//
// The computational manifold is the closed ball M = {|x| <= rho} sitting
// inside an extended ball M~ = {|x| <= rho_ext}. The boundary defining
// function is b(x) = |x|^2 - rho^2, whose gradient is exact.

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace trt {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class Region { Interior, Boundary, Exterior };

struct Domain {
    int n = 3;
    double rho = 1.0;
    double rho_ext = 1.2;

    Domain() = default;
    Domain(int n_, double rho_, double rho_ext_);

    double boundary_tol() const { return 1e-9 * rho * rho; }
    // b(x) = |x|^2 - rho^2 against the inner ball M
    double b(const Vec& x) const { return x.squaredNorm() - rho * rho; }
    // same defining function against the extended ball
    double b_ext(const Vec& x) const { return x.squaredNorm() - rho_ext * rho_ext; }

    Region classify(const Vec& x) const;
    bool inside_extended(const Vec& x) const { return b_ext(x) <= boundary_tol(); }
};

// Analytic metric g_ij(x) with component and first-derivative evaluators.
// Shipped families: Euclidean and conformal c(x)^2 * delta_ij with
// c(x) = 1 + a|x|^2. A custom hook accepts closed-form components; when no
// derivative evaluator is supplied, central differences are used.
class MetricField {
public:
    enum class Kind { Euclidean, Conformal, Custom };

    using ComponentFn = std::function<Mat(const Vec&)>;
    using DerivativeFn = std::function<std::vector<Mat>(const Vec&)>;

    static MetricField euclidean(int n);
    static MetricField conformal(int n, double a);
    static MetricField custom(int n, ComponentFn g, DerivativeFn dg = nullptr,
                              double fd_step = 1e-5);

    int dim() const { return n_; }
    Kind kind() const { return kind_; }
    double conformal_a() const { return a_; }

    Mat metric(const Vec& x) const;
    Mat inverse_metric(const Vec& x) const;
    // dg[k](i,j) = d g_ij / d x_k
    std::vector<Mat> metric_derivative(const Vec& x) const;
    // Gamma[k](i,j) = Gamma^k_ij, symmetric in (i,j)
    std::vector<Mat> christoffel(const Vec& x) const;

    double inner(const Vec& x, const Vec& u, const Vec& v) const;
    double norm(const Vec& x, const Vec& u) const { return std::sqrt(inner(x, u, u)); }
    Vec normalized(const Vec& x, const Vec& u) const;

private:
    MetricField(int n, Kind k) : n_(n), kind_(k) {}
    int n_;
    Kind kind_;
    double a_ = 0.0;
    ComponentFn g_fn_;
    DerivativeFn dg_fn_;
    double fd_step_ = 1e-5;
};

// Spec-facing checked operations. The pre-condition "x inside the outer
// ball" is enforced here; engine internals call MetricField directly.
Mat eval_metric(const MetricField& field, const Domain& domain, const Vec& x);
std::vector<Mat> eval_christoffel(const MetricField& field, const Domain& domain, const Vec& x);
double inner_product(const MetricField& field, const Domain& domain, const Vec& x,
                     const Vec& u, const Vec& v);

struct ConvexityReport {
    double min_value = 0.0;          // min of <grad_xi nu, xi> over samples
    bool pass = false;
    Vec worst_point;
    Vec worst_tangent;
    int samples = 0;
};

// Samples points on dM and unit tangents, evaluates the second fundamental
// form of the boundary numerically and reports the worst sample.
ConvexityReport check_boundary_convexity(const MetricField& field, const Domain& domain,
                                         int sample_count);

// Deterministic quasi-uniform points on the unit sphere S^{n-1}.
std::vector<Vec> sphere_points(int n, int count);

// Van der Corput radical inverse (Halton coordinate) for index >= 1.
double halton(int index, int base);
// Rational approximation of the standard normal quantile function.
double inverse_normal_cdf(double u);

// Completes `fixed` (g-orthonormalized first) to a g-orthonormal basis at x.
// Seeds are consumed in order; near-dependent seeds are skipped and the
// canonical basis is used to fill the remainder. Returns n vectors, the
// first `fixed.size()` spanning the same flag as the inputs.
std::vector<Vec> gs_complete(const MetricField& field, const Vec& x,
                             const std::vector<Vec>& fixed,
                             const std::vector<Vec>& seeds = {});

// g-unit outward normal of the sphere |x| = const through x (gradient of b
// raised by g^{-1}, normalized). Defined on a neighborhood of the boundary.
Vec outward_normal(const MetricField& field, const Vec& x);

}  // namespace trt
