#include "trt/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace trt {

namespace {

struct Flow {
    const MetricField& field;

    // right-hand side of the first-order geodesic system
    void rhs(const Vec& z, const Vec& zeta, Vec& dz, Vec& dzeta) const {
        dz = zeta;
        const auto gamma = field.christoffel(z);
        const int n = field.dim();
        dzeta.resize(n);
        for (int k = 0; k < n; ++k) dzeta[k] = -zeta.dot(gamma[k] * zeta);
    }

    PathState step(const PathState& s, double dt) const {
        Vec k1z, k1v, k2z, k2v, k3z, k3v, k4z, k4v;
        rhs(s.z, s.zeta, k1z, k1v);
        rhs(s.z + 0.5 * dt * k1z, s.zeta + 0.5 * dt * k1v, k2z, k2v);
        rhs(s.z + 0.5 * dt * k2z, s.zeta + 0.5 * dt * k2v, k3z, k3v);
        rhs(s.z + dt * k3z, s.zeta + dt * k3v, k4z, k4v);
        PathState out;
        out.t = s.t + dt;
        out.z = s.z + (dt / 6.0) * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
        out.zeta = s.zeta + (dt / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        return out;
    }
};

// Bisection for the crossing of `level` inside (0, dt] from s0. `rising`
// states the orientation: level goes from <= 0 at s0 to > 0 at dt.
double refine_crossing(const Flow& flow, const PathState& s0, double dt,
                       const std::function<double(const Vec&)>& level, double tol,
                       bool rising) {
    double lo = 0.0, hi = dt;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double v = level(flow.step(s0, mid).z);
        if (std::abs(v) <= tol) return mid;
        if ((v > 0.0) == rising)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

int bracket_index(const GeodesicPath& path, double t) {
    // largest i with samples[i].t <= t, capped to allow a forward step
    const auto& s = path.samples;
    int lo = 0, hi = static_cast<int>(s.size()) - 1;
    while (lo < hi) {
        const int mid = (lo + hi + 1) / 2;
        if (s[mid].t <= t)
            lo = mid;
        else
            hi = mid - 1;
    }
    return std::min(lo, static_cast<int>(s.size()) - 2);
}

}  // namespace

GeodesicPath shoot_geodesic(const MetricField& field, const Domain& domain, const Vec& x,
                            const Vec& theta, double h, double max_steps_factor) {
    if (!(h > 0.0)) throw std::invalid_argument("shoot_geodesic: step h must be positive");
    if (static_cast<int>(x.size()) != field.dim() ||
        static_cast<int>(theta.size()) != field.dim())
        throw std::invalid_argument("shoot_geodesic: dimension mismatch");
    if (domain.b_ext(x) > domain.boundary_tol())
        throw std::domain_error("shoot_geodesic: start point outside the outer ball");

    Flow flow{field};
    GeodesicPath path;
    path.h = h;

    PathState s;
    s.t = 0.0;
    s.z = x;
    s.zeta = field.normalized(x, theta);
    path.samples.push_back(s);

    const long max_steps = static_cast<long>(std::ceil(max_steps_factor * domain.rho_ext / h));
    const double tol = domain.boundary_tol();
    auto level_ext = [&](const Vec& z) { return domain.b_ext(z); };

    bool exited = false;
    for (long step = 0; step < max_steps; ++step) {
        PathState next = flow.step(s, h);
        // exit only counts once the previous state is inside or on the shell
        if (domain.b_ext(next.z) > tol && domain.b_ext(s.z) <= tol) {
            const double tau = refine_crossing(flow, s, h, level_ext, tol, true);
            PathState exit_state = flow.step(s, tau);
            path.samples.push_back(exit_state);
            exited = true;
            break;
        }
        path.samples.push_back(next);
        s = next;
    }
    if (!exited)
        throw std::runtime_error(
            "shoot_geodesic: no exit from the extended ball within max_steps (h=" +
            std::to_string(h) + ", max_steps=" + std::to_string(max_steps) + ")");

    // locate entry/exit through dM
    auto level_in = [&](const Vec& z) { return domain.b(z); };
    const auto& smp = path.samples;
    bool inside = domain.b(smp.front().z) < 0.0;
    if (inside) {
        path.meets_M = true;
        path.t_enter = 0.0;
    }
    for (size_t i = 0; i + 1 < smp.size(); ++i) {
        const double b0 = domain.b(smp[i].z), b1 = domain.b(smp[i + 1].z);
        const double dt = smp[i + 1].t - smp[i].t;
        if (!inside && b0 >= 0.0 && b1 < 0.0) {
            const double tau = refine_crossing(flow, smp[i], dt, level_in, tol, false);
            path.meets_M = true;
            path.t_enter = smp[i].t + tau;
            inside = true;
        } else if (inside && b0 < 0.0 && b1 >= 0.0) {
            const double tau = refine_crossing(flow, smp[i], dt, level_in, tol, true);
            path.t_exit = smp[i].t + tau;
            inside = false;
        }
    }
    if (path.meets_M && inside) path.t_exit = path.exit_time();  // should not happen
    return path;
}

PathState integrate_fixed(const MetricField& field, const Vec& x, const Vec& theta, double h,
                          double T) {
    if (!(h > 0.0)) throw std::invalid_argument("integrate_fixed: step h must be positive");
    Flow flow{field};
    PathState s;
    s.t = 0.0;
    s.z = x;
    s.zeta = field.normalized(x, theta);
    const long full = static_cast<long>(std::floor(T / h + 1e-12));
    for (long i = 0; i < full; ++i) s = flow.step(s, h);
    const double rem = T - full * h;
    if (rem > 1e-14) s = flow.step(s, rem);
    return s;
}

PathState geodesic_state_at(const MetricField& field, const GeodesicPath& path, double t) {
    const auto& s = path.samples;
    if (s.size() < 2) return s.front();
    t = std::clamp(t, s.front().t, s.back().t);
    const int i = bracket_index(path, t);
    const double dt = t - s[i].t;
    if (dt <= 1e-15) return s[i];
    Flow flow{field};
    return flow.step(s[i], dt);
}

namespace {

// transport matrix A(z, zeta): A(k, j) = Gamma^k_ij zeta^i, so eta' = -A eta
Mat transport_matrix(const MetricField& field, const Vec& z, const Vec& zeta) {
    const auto gamma = field.christoffel(z);
    const int n = field.dim();
    Mat a(n, n);
    for (int k = 0; k < n; ++k) a.row(k) = (gamma[k] * zeta).transpose();
    return a;
}

// one RK4 transport step over [s0.t, s0.t + dt] for several vectors, with
// the geodesic state interpolated at the half step
void transport_step(const MetricField& field, const Flow& flow, const PathState& s0,
                    const PathState& s_end, double dt, std::vector<Vec>& vecs) {
    const PathState s_half = flow.step(s0, 0.5 * dt);
    const Mat a0 = transport_matrix(field, s0.z, s0.zeta);
    const Mat ah = transport_matrix(field, s_half.z, s_half.zeta);
    const Mat af = transport_matrix(field, s_end.z, s_end.zeta);
    for (Vec& v : vecs) {
        const Vec k1 = -(a0 * v);
        const Vec k2 = -(ah * (v + 0.5 * dt * k1));
        const Vec k3 = -(ah * (v + 0.5 * dt * k2));
        const Vec k4 = -(af * (v + dt * k3));
        v += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
}

}  // namespace

TransportedVector parallel_transport(const MetricField& field, const GeodesicPath& path,
                                     const Vec& eta0) {
    if (path.samples.size() < 2)
        throw std::invalid_argument("parallel_transport: path needs at least 2 samples");
    if (static_cast<int>(eta0.size()) != field.dim())
        throw std::invalid_argument("parallel_transport: vector dimension mismatch");
    Flow flow{field};
    TransportedVector tv;
    tv.eta0 = eta0;
    tv.eta.reserve(path.samples.size());
    std::vector<Vec> cur{eta0};
    tv.eta.push_back(eta0);
    for (size_t i = 0; i + 1 < path.samples.size(); ++i) {
        const double dt = path.samples[i + 1].t - path.samples[i].t;
        transport_step(field, flow, path.samples[i], path.samples[i + 1], dt, cur);
        tv.eta.push_back(cur[0]);
    }
    return tv;
}

Vec transported_at(const MetricField& field, const GeodesicPath& path,
                   const TransportedVector& tv, double t) {
    const auto& s = path.samples;
    t = std::clamp(t, s.front().t, s.back().t);
    const int i = bracket_index(path, t);
    const double dt = t - s[i].t;
    if (dt <= 1e-15) return tv.eta[i];
    Flow flow{field};
    const PathState s_end = flow.step(s[i], dt);
    std::vector<Vec> cur{tv.eta[i]};
    transport_step(field, flow, s[i], s_end, dt, cur);
    return cur[0];
}

TransportedFrame transport_frame(const MetricField& field, const GeodesicPath& path,
                                 const std::vector<Vec>& initial) {
    TransportedFrame fr;
    fr.vecs.reserve(initial.size());
    for (const Vec& v : initial) fr.vecs.push_back(parallel_transport(field, path, v));
    return fr;
}

std::vector<Vec> frame_at(const MetricField& field, const GeodesicPath& path,
                          const TransportedFrame& frame, double t) {
    const auto& s = path.samples;
    t = std::clamp(t, s.front().t, s.back().t);
    const int i = bracket_index(path, t);
    const double dt = t - s[i].t;
    std::vector<Vec> out;
    out.reserve(frame.vecs.size());
    if (dt <= 1e-15) {
        for (const auto& tv : frame.vecs) out.push_back(tv.eta[i]);
        return out;
    }
    Flow flow{field};
    const PathState s_end = flow.step(s[i], dt);
    for (const auto& tv : frame.vecs) out.push_back(tv.eta[i]);
    transport_step(field, flow, s[i], s_end, dt, out);
    return out;
}

void gauss_legendre(int m, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(m, 0.0);
    weights.assign(m, 0.0);
    for (int i = 0; i < m; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= m; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = m * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

namespace {

std::vector<SphereNode> polar_product(int n, int count, bool hemisphere) {
    std::vector<SphereNode> out;
    if (n == 1) {
        out.push_back({Vec::Constant(1, 1.0), 1.0});
        if (!hemisphere) out.push_back({Vec::Constant(1, -1.0), 1.0});
        return out;
    }
    if (n == 2) {
        if (hemisphere) {
            // {u_2 > 0} parameterized by angle in (-pi/2, pi/2), measure d(alpha)
            const int m = std::max(2, count);
            std::vector<double> xs, ws;
            gauss_legendre(m, xs, ws);
            for (int i = 0; i < m; ++i) {
                const double a = 0.5 * std::numbers::pi * xs[i];
                Vec u(2);
                u << std::sin(a), std::cos(a);
                out.push_back({u, ws[i] * 0.5 * std::numbers::pi});
            }
        } else {
            const int m = std::max(3, count);
            for (int i = 0; i < m; ++i) {
                const double a = 2.0 * std::numbers::pi * (i + 0.5) / m;
                Vec u(2);
                u << std::cos(a), std::sin(a);
                out.push_back({u, 2.0 * std::numbers::pi / m});
            }
        }
        return out;
    }
    // n >= 3: product of a polar rule against sin^{n-2} and S^{n-2}.
    // For odd n the weight (1-t^2)^{(n-3)/2} is polynomial in t = cos(phi)
    // and Gauss-Legendre in t is exact; for even n it has half-integer
    // power, so integrate in the angle instead where sin^{n-2} is smooth.
    const int m_polar =
        std::max(3, static_cast<int>(std::ceil(std::pow(std::max(1, count) / 2.0,
                                                        1.0 / (n - 1)))) + 2);
    const int sub_count =
        std::max(3, static_cast<int>(std::ceil(static_cast<double>(count) / m_polar)));
    std::vector<double> xs, ws;
    gauss_legendre(m_polar, xs, ws);
    const auto sub = polar_product(n - 1, sub_count, false);
    const double span = hemisphere ? 0.5 : 1.0;
    for (int i = 0; i < m_polar; ++i) {
        double t, st, w;
        if (n % 2 == 1) {
            // t in (-1, 1), or (0, 1) on the hemisphere
            t = hemisphere ? 0.5 * (xs[i] + 1.0) : xs[i];
            st = std::sqrt(std::max(0.0, 1.0 - t * t));
            w = span * ws[i] * std::pow(1.0 - t * t, (n - 3) / 2);
        } else {
            // angle in (0, pi), or (0, pi/2) on the hemisphere
            const double phi = span * 0.5 * std::numbers::pi * (xs[i] + 1.0);
            t = std::cos(phi);
            st = std::sin(phi);
            w = span * 0.5 * std::numbers::pi * ws[i] * std::pow(st, n - 2);
        }
        for (const auto& node : sub) {
            Vec u(n);
            u.head(n - 1) = st * node.dir;
            u[n - 1] = t;
            out.push_back({u, w * node.weight});
        }
    }
    return out;
}

}  // namespace

std::vector<SphereNode> sphere_quadrature(int n, int count) {
    return polar_product(n, count, false);
}

std::vector<SphereNode> hemisphere_quadrature(int n, int count) {
    return polar_product(n, count, true);
}

std::vector<InfluxSample> influx_samples(const MetricField& field, const Domain& domain,
                                         int boundary_count, int direction_count) {
    if (boundary_count < 1 || direction_count < 1)
        throw std::invalid_argument("influx_samples: counts must be >= 1");
    const int n = domain.n;
    const auto bnodes = sphere_quadrature(n, boundary_count);
    const auto dnodes = hemisphere_quadrature(n, direction_count);
    std::vector<InfluxSample> out;
    out.reserve(bnodes.size() * dnodes.size());
    const double radial = std::pow(domain.rho_ext, n - 1);

    for (const auto& bn : bnodes) {
        const Vec x = domain.rho_ext * bn.dir;
        // g-area correction of the boundary sphere at x
        std::vector<Vec> tang;
        {
            // Euclidean-orthonormal tangent basis via Gram-Schmidt against dir
            std::vector<Vec> basis{bn.dir};
            for (int k = 0; k < n && static_cast<int>(basis.size()) < n; ++k) {
                Vec e = Vec::Zero(n);
                e[k] = 1.0;
                for (const Vec& b : basis) e -= b.dot(e) * b;
                if (e.norm() > 1e-10) basis.push_back(e / e.norm());
            }
            tang.assign(basis.begin() + 1, basis.end());
        }
        const Mat g = field.metric(x);
        Mat gt(n - 1, n - 1);
        for (int a = 0; a < n - 1; ++a)
            for (int b = 0; b < n - 1; ++b) gt(a, b) = tang[a].dot(g * tang[b]);
        const double area_factor = std::sqrt(std::max(0.0, gt.determinant()));

        // g-orthonormal frame with the inward normal in the first slot
        const Vec nu_in = -outward_normal(field, x);
        const auto frame = gs_complete(field, x, {nu_in});

        for (const auto& dn : dnodes) {
            InfluxSample s;
            s.x = x;
            Vec xi = dn.dir[n - 1] * frame[0];
            for (int k = 0; k + 1 < n; ++k) xi += dn.dir[k] * frame[k + 1];
            s.xi = xi;
            s.santalo = dn.dir[n - 1];  // |<xi, nu>|_g in the orthonormal frame
            s.weight = bn.weight * radial * area_factor * dn.weight;
            out.push_back(std::move(s));
        }
    }
    return out;
}

void export_path_csv(const GeodesicPath& path, std::ostream& os) {
    const int n = static_cast<int>(path.samples.front().z.size());
    os << "t";
    for (int i = 1; i <= n; ++i) os << ",z" << i;
    for (int i = 1; i <= n; ++i) os << ",zeta" << i;
    os << "\n";
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        os << buf;
    };
    for (const auto& s : path.samples) {
        put(s.t);
        for (int i = 0; i < n; ++i) {
            os << ",";
            put(s.z[i]);
        }
        for (int i = 0; i < n; ++i) {
            os << ",";
            put(s.zeta[i]);
        }
        os << "\n";
    }
}

}  // namespace trt
