#pragma once
// The transverse ray transform and its adjoint.
//
//   Jf(gamma, eta)   = int f_ij(gamma(t)) eta^i(t) eta^j(t) dt
//   Jtf(x, theta)    = int I^{t,0}( P_{gamma'(t)} f(gamma(t)) ) dt
//   (Jt)* phi (x)    = int_{S_xM} P_xi( phi_sharp(x, xi) ) dsigma_x(xi)
//
// P_v is the transverse projector applied to both tensor slots; transport of
// a 2-tensor is realized by conjugation with a parallel g-orthonormal frame.

#include "trt/geodesics.hpp"
#include "trt/tensor_fields.hpp"

namespace trt {

// (P_v f)_ij with indices raised/lowered by g(x). Output is symmetric and
// annihilates v.
Mat project_transverse(const MetricField& field, const Vec& x, const Vec& v, const Mat& f_val);

// Composite Simpson quadrature of f(eta, eta) over the in-M segment of the
// path. Zero when the path misses M.
double trt_scalar(const MetricField& field, const Domain& domain, const SymTensorField2& f,
                  const GeodesicPath& path, const TransportedVector& eta);

// Tensor-valued transform at an influx pair (x, theta); shoots the geodesic
// internally with step h.
Mat trt_tensor(const MetricField& field, const Domain& domain, const SymTensorField2& f,
               const Vec& x, const Vec& theta, double h);

// Both sides of the pairing identity <Jtf(x,theta), eta0 (x) eta0> = Jf:
// first the tensor-route pairing, then the scalar route with the transported
// eta0. eta0 must be g-orthogonal to theta at x.
std::pair<double, double> pairing_consistency(const MetricField& field, const Domain& domain,
                                              const SymTensorField2& f, const Vec& x,
                                              const Vec& theta, const Vec& eta0, double h);

// Boundary data on the influx manifold: symmetric matrix phi(x, xi).
struct BoundaryTensorField {
    std::function<Mat(const Vec& x, const Vec& xi)> eval;
    Mat value(const Vec& x, const Vec& xi) const {
        Mat m = eval(x, xi);
        return 0.5 * (m + m.transpose());
    }
};

// (Jt)* phi at an interior point: sphere quadrature over g-unit directions;
// each direction is traced backward to the influx boundary, phi is read
// there, parallel-transported to x and projected transverse.
Mat adjoint_apply(const BoundaryTensorField& phi, const MetricField& field,
                  const Domain& domain, const Vec& x, int sphere_count, double h);

// g-invariant pairing of two lower-index symmetric tensors at x.
double tensor_pairing(const MetricField& field, const Vec& x, const Mat& a, const Mat& b);

// Number of Simpson subintervals used over a segment of length len at
// nominal step h (always even, at least 2).
int simpson_subdivisions(double len, double h);

}  // namespace trt
