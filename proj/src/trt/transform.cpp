#include "trt/transform.hpp"

#include "trt/frames.hpp"

#include <cmath>
#include <stdexcept>

namespace trt {

Mat project_transverse(const MetricField& field, const Vec& x, const Vec& v, const Mat& f_val) {
    const double v2 = field.inner(x, v, v);
    if (!(v2 > 0.0)) throw std::invalid_argument("project_transverse: zero velocity");
    const Vec v_low = field.metric(x) * v;  // lowered index
    const int n = field.dim();
    // Q^k_i = delta^k_i - v^k v_i / |v|^2 ; (P f)_ij = Q^k_i Q^l_j f_kl
    const Mat q = Mat::Identity(n, n) - (v * v_low.transpose()) / v2;
    Mat out = q.transpose() * f_val * q;
    return 0.5 * (out + out.transpose());
}

int simpson_subdivisions(double len, double h) {
    int m = static_cast<int>(std::ceil(len / std::max(h, 1e-12)));
    if (m < 2) m = 2;
    if (m % 2) ++m;
    return m;
}

double trt_scalar(const MetricField& field, const Domain& domain, const SymTensorField2& f,
                  const GeodesicPath& path, const TransportedVector& eta) {
    if (eta.eta.size() != path.samples.size())
        throw std::invalid_argument("trt_scalar: eta samples do not match the path");
    if (!path.meets_M) return 0.0;
    (void)domain;
    const double t0 = path.t_enter, t1 = path.t_exit;
    const int m = simpson_subdivisions(t1 - t0, path.h);
    const double dt = (t1 - t0) / m;
    double acc = 0.0;
    for (int j = 0; j <= m; ++j) {
        const double t = t0 + j * dt;
        const PathState s = geodesic_state_at(field, path, t);
        const Vec e = transported_at(field, path, eta, t);
        const double val = e.dot(f.value(s.z) * e);
        const double w = (j == 0 || j == m) ? 1.0 : (j % 2 ? 4.0 : 2.0);
        acc += w * val;
    }
    return acc * dt / 3.0;
}

namespace {

// transport conjugation: tensor with lower indices whose parallel frame
// components equal T, reconstructed at the point carrying (g0, frame0)
Mat reconstruct_from_frame(const Mat& g0, const std::vector<Vec>& frame0, const Mat& t_frame) {
    const int n = static_cast<int>(g0.rows());
    Mat fmat(n, n);
    for (int a = 0; a < n; ++a) fmat.col(a) = frame0[a];
    const Mat low = g0 * fmat;  // columns are lowered frame vectors
    Mat out = low * t_frame * low.transpose();
    return 0.5 * (out + out.transpose());
}

Mat frame_components(const std::vector<Vec>& frame, const Mat& value) {
    const int n = static_cast<int>(value.rows());
    Mat fmat(n, n);
    for (int a = 0; a < n; ++a) fmat.col(a) = frame[a];
    return fmat.transpose() * value * fmat;
}

}  // namespace

Mat trt_tensor(const MetricField& field, const Domain& domain, const SymTensorField2& f,
               const Vec& x, const Vec& theta, double h) {
    const int n = field.dim();
    const GeodesicPath path = shoot_geodesic(field, domain, x, theta, h);
    if (!path.meets_M) return Mat::Zero(n, n);

    const Vec that0 = path.samples.front().zeta;
    const auto normals0 = gram_schmidt_frame(field, x, that0);
    const TransportedFrame tframe = transport_frame(field, path, normals0);

    std::vector<Vec> frame0 = normals0;
    frame0.push_back(that0);
    const Mat g0 = field.metric(x);

    const double t0 = path.t_enter, t1 = path.t_exit;
    const int m = simpson_subdivisions(t1 - t0, h);
    const double dt = (t1 - t0) / m;
    Mat acc = Mat::Zero(n, n);
    for (int j = 0; j <= m; ++j) {
        const double t = t0 + j * dt;
        const PathState s = geodesic_state_at(field, path, t);
        std::vector<Vec> fr = frame_at(field, path, tframe, t);
        fr.push_back(s.zeta);
        const Mat pf = project_transverse(field, s.z, s.zeta, f.value(s.z));
        const Mat t_comp = frame_components(fr, pf);
        const double w = (j == 0 || j == m) ? 1.0 : (j % 2 ? 4.0 : 2.0);
        acc += w * t_comp;
    }
    acc *= dt / 3.0;
    return reconstruct_from_frame(g0, frame0, acc);
}

std::pair<double, double> pairing_consistency(const MetricField& field, const Domain& domain,
                                              const SymTensorField2& f, const Vec& x,
                                              const Vec& theta, const Vec& eta0, double h) {
    const Vec that = field.normalized(x, theta);
    if (std::abs(field.inner(x, that, eta0)) > 1e-8 * field.norm(x, eta0))
        throw std::invalid_argument("pairing_consistency: eta0 must be g-orthogonal to theta");
    const Mat jt = trt_tensor(field, domain, f, x, theta, h);
    const double tensor_route = eta0.dot(jt * eta0);
    const GeodesicPath path = shoot_geodesic(field, domain, x, theta, h);
    const TransportedVector tv = parallel_transport(field, path, eta0);
    const double scalar_route = trt_scalar(field, domain, f, path, tv);
    return {tensor_route, scalar_route};
}

Mat adjoint_apply(const BoundaryTensorField& phi, const MetricField& field,
                  const Domain& domain, const Vec& x, int sphere_count, double h) {
    if (domain.b(x) >= 0.0)
        throw std::invalid_argument("adjoint_apply: point must be interior to M");
    const int n = field.dim();
    const auto nodes = sphere_quadrature(n, sphere_count);
    // map Euclidean sphere nodes through a g-orthonormal frame at x
    const auto frame = gs_complete(field, x, {});
    const Mat gx = field.metric(x);

    Mat acc = Mat::Zero(n, n);
    for (const auto& node : nodes) {
        Vec xi = Vec::Zero(n);
        for (int k = 0; k < n; ++k) xi += node.dir[k] * frame[k];
        // trace backward: shoot along -xi to the extended boundary
        const GeodesicPath back = shoot_geodesic(field, domain, x, -xi, h);
        const PathState& exit_state = back.samples.back();
        const Vec y = exit_state.z;
        const Vec xi_in = -exit_state.zeta;  // influx direction at y
        const Mat phi_val = phi.value(y, xi_in);

        // transport phi from y to x along the backward path: equal parallel
        // frame components at both ends
        const auto normals0 = gram_schmidt_frame(field, x, -xi);
        const TransportedFrame tframe = transport_frame(field, back, normals0);
        std::vector<Vec> fr_end = frame_at(field, back, tframe, exit_state.t);
        fr_end.push_back(exit_state.zeta);
        std::vector<Vec> fr0 = normals0;
        fr0.push_back(back.samples.front().zeta);

        const Mat t_comp = frame_components(fr_end, phi_val);
        const Mat phi_sharp = reconstruct_from_frame(gx, fr0, t_comp);
        acc += node.weight * project_transverse(field, x, xi, phi_sharp);
    }
    return acc;
}

double tensor_pairing(const MetricField& field, const Vec& x, const Mat& a, const Mat& b) {
    const Mat gi = field.inverse_metric(x);
    return (gi * a * gi * b).trace();
}

}  // namespace trt
