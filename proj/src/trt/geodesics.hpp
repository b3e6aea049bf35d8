#pragma once
// Geodesic flow and parallel transport.
//
// The geodesic ODE is integrated as the first-order system
//   z'    = zeta
//   zeta'^k = -Gamma^k_ij(z) zeta^i zeta^j
// with fixed-step RK4; the exit through the extended boundary (and the
// entry/exit through dM when the path meets M) is refined by bisection on
// partial RK4 steps. Transport of a vector along a stored path integrates
//   eta'^k = -Gamma^k_ij(z) zeta^i eta^j.

#include "trt/geometry.hpp"

#include <optional>
#include <vector>

namespace trt {

struct PathState {
    double t = 0.0;
    Vec z;     // position
    Vec zeta;  // velocity, g-unit along geodesics
};

struct GeodesicPath {
    std::vector<PathState> samples;  // uniform step h, final sample at the exit time
    double h = 0.0;
    bool meets_M = false;
    double t_enter = 0.0;  // entry into M (valid when meets_M)
    double t_exit = 0.0;   // exit out of M
    double exit_time() const { return samples.back().t; }
    double chord_length() const { return meets_M ? t_exit - t_enter : 0.0; }
};

// Shoots from x in direction theta (normalized internally in g) until the
// path leaves the extended ball. max_steps = ceil(factor * rho_ext / h).
GeodesicPath shoot_geodesic(const MetricField& field, const Domain& domain, const Vec& x,
                            const Vec& theta, double h, double max_steps_factor = 4.0);

// Plain RK4 integration to a fixed time T (no boundary handling); used for
// convergence measurements.
PathState integrate_fixed(const MetricField& field, const Vec& x, const Vec& theta, double h,
                          double T);

// Dense output: state at parameter t via a partial RK4 step from the
// bracketing stored sample. t is clamped to [0, exit_time].
PathState geodesic_state_at(const MetricField& field, const GeodesicPath& path, double t);

struct TransportedVector {
    Vec eta0;
    std::vector<Vec> eta;  // aligned with path.samples
};

TransportedVector parallel_transport(const MetricField& field, const GeodesicPath& path,
                                     const Vec& eta0);

// Transported vector at parameter t (partial RK4 from the bracketing sample).
Vec transported_at(const MetricField& field, const GeodesicPath& path,
                   const TransportedVector& tv, double t);

// A g-orthonormal frame transported along the path. By construction
// frame k = n-1 slots hold the n-1 vectors orthogonal to the velocity;
// the velocity itself is parallel and g-unit, so it completes the frame.
struct TransportedFrame {
    std::vector<TransportedVector> vecs;  // size n-1
};

TransportedFrame transport_frame(const MetricField& field, const GeodesicPath& path,
                                 const std::vector<Vec>& initial);

// All frame vectors at parameter t, evaluated with shared RK4 stages.
std::vector<Vec> frame_at(const MetricField& field, const GeodesicPath& path,
                          const TransportedFrame& frame, double t);

struct InfluxSample {
    Vec x;               // boundary point on the extended sphere
    Vec xi;              // inward g-unit direction, <xi, nu>_g < 0
    double santalo = 0;  // |<xi, nu>|_g
    double weight = 0;   // quadrature weight against dA_g(x) dsigma_x(xi)
};

// Deterministic product quadrature over the influx boundary of the extended
// ball. Sums of weight * santalo * F approximate the Santalo-weighted
// integral of F over Gamma_-.
std::vector<InfluxSample> influx_samples(const MetricField& field, const Domain& domain,
                                         int boundary_count, int direction_count);

struct SphereNode {
    Vec dir;
    double weight;
};

// Product polar quadrature on the Euclidean unit sphere S^{n-1} with at
// least `count` nodes; weights sum to vol(S^{n-1}).
std::vector<SphereNode> sphere_quadrature(int n, int count);

// Same on the hemisphere {u_n > 0}; weights sum to vol(S^{n-1})/2.
std::vector<SphereNode> hemisphere_quadrature(int n, int count);

// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int m, std::vector<double>& nodes, std::vector<double>& weights);

void export_path_csv(const GeodesicPath& path, std::ostream& os);

}  // namespace trt
