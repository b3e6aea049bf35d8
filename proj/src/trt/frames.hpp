#pragma once
// Transverse direction systems: the analytic direction map theta(xi),
// orthonormal normal frames along geodesics, and the spanning set of
// N = n(n+1)/2 unit vectors whose symmetrized squares determine a symmetric
// 2-tensor from its quadratic-form values.

#include "trt/geometry.hpp"

namespace trt {

// theta(xi) = (xi_1, ..., xi_{n-2}, -(xi_1^2+...+xi_{n-2}^2+xi_n)/xi_{n-1}, 1).
// Satisfies theta.xi = 0 and theta^n = 1 identically; requires xi_{n-1} != 0.
Vec theta_of_xi(const Vec& xi);

// n-1 g-orthonormal vectors orthogonal to theta at x, built by Gram-Schmidt
// from the given seeds (canonical basis appended as fallback). Deterministic.
std::vector<Vec> gram_schmidt_frame(const MetricField& field, const Vec& x, const Vec& theta,
                                    const std::vector<Vec>& seeds = {});

struct SpanningMember {
    Vec eta;        // unit direction
    Vec witness;    // unit theta with <witness, eta> = 0 and <witness, xi0> = 0
    double a_p = 1.0, a_q = 0.0;
    int p = -1, q = -1;  // pair origin for composite members, -1 for base
    int case_id = 0;     // 0 base, 1..3 per the pair case analysis
};

struct SpanningSet {
    int n = 0;
    Vec theta0, xi0;
    double eps = 0.0;          // combination parameter actually used
    double delta_theta = 0.0;  // admissible witness distance to theta0
    std::vector<SpanningMember> members;  // exactly n(n+1)/2
    Mat gram;        // G_kl = <eta_k, eta_l>^2  (Frobenius pairing of eta^{x2})
    Vec gram_eigs;   // ascending
    Mat quad;        // row k: quadratic-form functional on upper-tri components
    int count() const { return static_cast<int>(members.size()); }
    int rank() const;  // eigenvalues above gram_eigs.max * 1e-12
};

// Builds the spanning set in the canonical frame theta0 = e_n, xi0 = e_{n-1}
// and maps it to general positions by the orthogonal transform taking the
// canonical pair onto (theta0, xi0). Requires n >= 3 and theta0 _|_ xi0.
// If a composite witness leaves the delta_theta neighborhood of theta0, eps
// is halved and the set rebuilt; eps underflow below 1e-8 is an error.
SpanningSet build_spanning_set(int n, const Vec& theta0, const Vec& xi0,
                               double delta_theta = 0.3, double eps = 0.1);

SpanningSet build_spanning_set(int n, double delta_theta = 0.3, double eps = 0.1);

// Solves the N x N system mapping a symmetric matrix to its quadratic forms
// against the members; errors out when the system's condition number
// exceeds 1e12.
Mat recover_tensor_from_quadratic_values(const SpanningSet& spanning, const Vec& values);

// Upper-triangular (row-major) vectorization helpers shared with the lab.
int sym_component_count(int n);
Vec sym_to_vec(const Mat& m);
Mat vec_to_sym(int n, const Vec& v);
// Row of the quadratic-form functional for direction eta (off-diagonal
// entries doubled so that row . sym_to_vec(f) = eta^T f eta).
Vec quadratic_row(const Vec& eta);

}  // namespace trt
