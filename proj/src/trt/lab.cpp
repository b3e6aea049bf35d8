#include "trt/lab.hpp"

#include "trt/parallel.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace trt {

namespace {

constexpr int kHaltonPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};

Vec halton_unit_vector(int index, int dim_offset, int n) {
    Vec p(n);
    for (int k = 0; k < n; ++k)
        p[k] = inverse_normal_cdf(halton(index, kHaltonPrimes[(dim_offset + k) % 10]));
    const double s = p.norm();
    if (s == 0.0) {
        p.setZero();
        p[0] = 1.0;
        return p;
    }
    return p / s;
}

bool path_avoids(const GeodesicPath& path, const AvoidBall& ball) {
    for (const auto& s : path.samples)
        if ((s.z - ball.center).norm() <= ball.radius) return false;
    return true;
}

}  // namespace

RayFamily sample_ray_family(const MetricField& field, const Domain& domain,
                            const RayFamilySpec& spec, double h) {
    if (spec.count < 1) throw std::invalid_argument("sample_ray_family: count must be >= 1");
    if (!(spec.dir_cap > 0.0) || spec.dir_cap >= 0.5 * std::numbers::pi)
        throw std::invalid_argument("sample_ray_family: dir_cap must lie in (0, pi/2)");
    const int n = domain.n;
    RayFamily fam;
    fam.samples.reserve(spec.count);
    const double mu_min = std::cos(spec.dir_cap);
    const long max_attempts = 200L * spec.count;
    long idx = 0;
    while (static_cast<int>(fam.samples.size()) < spec.count) {
        if (++idx > max_attempts)
            throw std::runtime_error(
                "sample_ray_family: avoidance region rejects too many candidates");
        // boundary point from the first n Halton dimensions
        const Vec u = halton_unit_vector(static_cast<int>(idx), 0, n);
        const Vec x = domain.rho_ext * u;
        const Vec nu_in = -outward_normal(field, x);
        const auto frame = gs_complete(field, x, {nu_in});
        // inward direction: polar angle within the cap (cos-uniform), then azimuth
        const double ua = halton(static_cast<int>(idx), kHaltonPrimes[n % 10]);
        const double mu = 1.0 - ua * (1.0 - mu_min);
        const double sa = std::sqrt(std::max(0.0, 1.0 - mu * mu));
        Vec xi = mu * frame[0];
        if (n == 2) {
            const double sgn = halton(static_cast<int>(idx), kHaltonPrimes[(n + 1) % 10]) < 0.5
                                   ? -1.0
                                   : 1.0;
            xi += sgn * sa * frame[1];
        } else {
            const Vec az = halton_unit_vector(static_cast<int>(idx), n + 1, n - 1);
            for (int k = 0; k + 1 < n; ++k) xi += sa * az[k] * frame[k + 1];
        }
        if (spec.avoid) {
            const GeodesicPath path = shoot_geodesic(field, domain, x, xi, h);
            if (!path_avoids(path, *spec.avoid)) continue;
        }
        InfluxSample s;
        s.x = x;
        s.xi = xi;
        s.santalo = mu;
        s.weight = 1.0 / spec.count;
        fam.samples.push_back(std::move(s));
    }
    return fam;
}

std::vector<uint8_t> coverage_mask(const MetricField& field, const Domain& domain,
                                   const GridSpec& grid, const RayFamily& family, double h) {
    std::vector<uint8_t> mask(grid.voxel_count(), 0);
    const auto support = support_mask(grid, domain);
    const double half_diag = grid.half_diagonal();
    const int stride = std::max(1, static_cast<int>(std::floor(grid.cell() / (2.0 * h))));
    const int n = grid.n;
    std::vector<int> idx(n);
    for (const auto& s : family.samples) {
        const GeodesicPath path = shoot_geodesic(field, domain, s.x, s.xi, h);
        for (size_t i = 0; i < path.samples.size(); i += stride) {
            const Vec& z = path.samples[i].z;
            const long v0 = grid.locate(z);
            if (v0 < 0) continue;
            const auto base = grid.multi_index(v0);
            // neighbors whose center is within half a voxel diagonal of z
            const int nb = 1;
            std::vector<int> cur(n, -nb);
            while (true) {
                bool ok = true;
                for (int d = 0; d < n; ++d) {
                    idx[d] = base[d] + cur[d];
                    if (idx[d] < 0 || idx[d] >= grid.res) ok = false;
                }
                if (ok) {
                    const long v = grid.flat_index(idx);
                    if (support[v] && !mask[v] && (z - grid.center(v)).norm() <= half_diag)
                        mask[v] = 1;
                }
                int d = 0;
                while (d < n && ++cur[d] > nb) cur[d++] = -nb;
                if (d == n) break;
            }
        }
    }
    return mask;
}

namespace {

// Per-ray transverse direction coefficients against the transported normal
// frame. For n >= 3 these are the spanning-set members mapped to the frame
// and projected transverse; for n = 2 the single normal direction.
Mat direction_coefficients(int n, const std::optional<SpanningSet>& spanning) {
    if (!spanning) {
        if (n != 2)
            throw std::invalid_argument("assemble_forward: spanning set required for n >= 3");
        Mat c(1, 1);
        c(0, 0) = 1.0;
        return c;
    }
    const int nd = spanning->count();
    Mat c(nd, n - 1);
    for (int k = 0; k < nd; ++k) {
        // canonical components against (e_1..e_{n-1}) are the frame
        // coefficients; the e_n component (along the velocity) is dropped
        Vec coeff = spanning->members[k].eta.head(n - 1);
        const double s = coeff.norm();
        if (s < 1e-12)
            throw std::runtime_error("assemble_forward: spanning member is purely longitudinal");
        c.row(k) = (coeff / s).transpose();
    }
    return c;
}

struct RayRows {
    std::vector<Eigen::Triplet<double>> trip;
    bool zero = true;
};

}  // namespace

ForwardMatrix assemble_forward(const MetricField& field, const Domain& domain,
                               const GridSpec& grid, const RayFamily& family,
                               const std::optional<SpanningSet>& spanning, double h,
                               const std::vector<uint8_t>* column_mask) {
    const int n = domain.n;
    const int nc = sym_component_count(n);
    const Mat coeffs = direction_coefficients(n, spanning);
    const int nd = static_cast<int>(coeffs.rows());

    ForwardMatrix fm;
    fm.grid = grid;
    fm.n_dirs = nd;
    const auto support = support_mask(grid, domain);
    fm.voxel_col_base.assign(grid.voxel_count(), -1);
    for (long v = 0; v < grid.voxel_count(); ++v) {
        if (!support[v]) continue;
        if (column_mask && !(*column_mask)[v]) continue;
        fm.voxel_col_base[v] = static_cast<long>(fm.col_voxel.size());
        for (int c = 0; c < nc; ++c) {
            fm.col_voxel.push_back(v);
            fm.col_comp.push_back(c);
        }
    }
    const long cols = static_cast<long>(fm.col_voxel.size());
    const int rays = static_cast<int>(family.samples.size());
    const long rows = static_cast<long>(rays) * nd;
    fm.row_ray.resize(rows);
    fm.row_dir.resize(rows);
    fm.zero_row.assign(rows, 1);
    for (int r = 0; r < rays; ++r)
        for (int k = 0; k < nd; ++k) {
            fm.row_ray[r * nd + k] = r;
            fm.row_dir[r * nd + k] = k;
        }

    std::vector<RayRows> per_ray(rays);
    parallel_for(rays, [&](int r) {
        const InfluxSample& smp = family.samples[r];
        const GeodesicPath path = shoot_geodesic(field, domain, smp.x, smp.xi, h);
        if (!path.meets_M) return;
        const Vec that0 = path.samples.front().zeta;
        const auto normals0 = gram_schmidt_frame(field, smp.x, that0);
        const TransportedFrame tframe = transport_frame(field, path, normals0);

        const double t0 = path.t_enter, t1 = path.t_exit;
        const int m = simpson_subdivisions(t1 - t0, h);
        const double dt = (t1 - t0) / m;

        std::vector<Vec> rowbuf(nd, Vec::Zero(cols));
        std::vector<InterpEntry> stencil;
        for (int j = 0; j <= m; ++j) {
            const double t = t0 + j * dt;
            const PathState s = geodesic_state_at(field, path, t);
            interp_stencil(grid, s.z, stencil);
            bool any = false;
            for (const auto& e : stencil)
                if (fm.voxel_col_base[e.voxel] >= 0) any = true;
            if (!any) continue;
            const std::vector<Vec> fr = frame_at(field, path, tframe, t);
            const double w = ((j == 0 || j == m) ? 1.0 : (j % 2 ? 4.0 : 2.0)) * dt / 3.0;
            for (int k = 0; k < nd; ++k) {
                Vec d = Vec::Zero(n);
                for (int a = 0; a + 1 < n; ++a) d += coeffs(k, a) * fr[a];
                const Vec qrow = quadratic_row(d);
                for (const auto& e : stencil) {
                    const long base = fm.voxel_col_base[e.voxel];
                    if (base < 0) continue;
                    for (int c = 0; c < nc; ++c)
                        rowbuf[k][base + c] += w * e.weight * qrow[c];
                }
            }
        }
        RayRows& rr = per_ray[r];
        for (int k = 0; k < nd; ++k) {
            for (long c = 0; c < cols; ++c)
                if (rowbuf[k][c] != 0.0)
                    rr.trip.emplace_back(r * nd + k, static_cast<int>(c), rowbuf[k][c]);
        }
        rr.zero = rr.trip.empty();
    });

    std::vector<Eigen::Triplet<double>> trip;
    size_t total = 0;
    for (const auto& rr : per_ray) total += rr.trip.size();
    trip.reserve(total);
    for (int r = 0; r < rays; ++r) {
        trip.insert(trip.end(), per_ray[r].trip.begin(), per_ray[r].trip.end());
        if (!per_ray[r].zero)
            for (int k = 0; k < nd; ++k) fm.zero_row[r * nd + k] = 0;
    }
    fm.a.resize(rows, cols);
    fm.a.setFromTriplets(trip.begin(), trip.end());
    fm.a.makeCompressed();
    return fm;
}

Vec gather_columns(const ForwardMatrix& fm, const std::vector<double>& comps) {
    const int nc = sym_component_count(fm.grid.n);
    if (static_cast<long>(comps.size()) != fm.grid.voxel_count() * nc)
        throw std::invalid_argument("gather_columns: component buffer size mismatch");
    Vec x(fm.cols());
    for (long c = 0; c < fm.cols(); ++c) x[c] = comps[fm.col_voxel[c] * nc + fm.col_comp[c]];
    return x;
}

std::vector<double> scatter_columns(const ForwardMatrix& fm, const Vec& x) {
    const int nc = sym_component_count(fm.grid.n);
    std::vector<double> comps(fm.grid.voxel_count() * nc, 0.0);
    for (long c = 0; c < fm.cols(); ++c) comps[fm.col_voxel[c] * nc + fm.col_comp[c]] = x[c];
    return comps;
}

SolveResult solve_tikhonov(const ForwardMatrix& fm, const Vec& data, double lambda, int iters,
                           double tol) {
    if (data.size() != fm.rows())
        throw std::invalid_argument("solve_tikhonov: data length does not match rows");
    if (lambda < 0.0) throw std::invalid_argument("solve_tikhonov: lambda must be >= 0");
    const auto& a = fm.a;
    SolveResult out;
    Vec x = Vec::Zero(fm.cols());
    Vec ax = Vec::Zero(fm.rows());   // A x, maintained incrementally
    Vec r = a.transpose() * data;    // normal-equation residual A^T d - (A^T A + l) x
    const double rhs_norm = r.norm();
    Vec p = r;
    double rs = r.squaredNorm();
    out.objective.push_back(data.squaredNorm());
    if (rhs_norm == 0.0) {
        out.x = x;
        out.converged = true;
        return out;
    }
    int it = 0;
    for (; it < iters; ++it) {
        const Vec q = a * p;
        const double denom = q.squaredNorm() + lambda * p.squaredNorm();
        if (denom <= 0.0) break;
        const double alpha = rs / denom;
        x += alpha * p;
        ax += alpha * q;
        r -= alpha * (a.transpose() * q + lambda * p);
        out.objective.push_back((ax - data).squaredNorm() + lambda * x.squaredNorm());
        const double rs_new = r.squaredNorm();
        if (std::sqrt(rs_new) <= tol * rhs_norm) {
            rs = rs_new;
            ++it;
            break;
        }
        p = r + (rs_new / rs) * p;
        rs = rs_new;
    }
    out.x = x;
    out.iterations = it;
    out.final_residual = std::sqrt(rs) / rhs_norm;
    out.converged = out.final_residual <= tol * 10.0;
    return out;
}

int SingularReport::near_null_count(double rel_tol) const {
    int c = 0;
    for (int i = 0; i < values.size(); ++i)
        if (values[i] < sigma_max * rel_tol) ++c;
    return c;
}

SingularReport singular_values_dense(const Mat& m) {
    SingularReport rep;
    Eigen::BDCSVD<Mat> svd(m);
    rep.values = svd.singularValues();
    rep.sigma_max = rep.values.size() ? rep.values(0) : 0.0;
    const long k = std::min(m.rows(), m.cols());
    rep.sigma_min = k > 0 ? rep.values(k - 1) : 0.0;
    // rank deficiency from the shape itself: rows < cols means exact nulls
    if (m.rows() < m.cols()) {
        Vec padded(m.cols());
        padded.setZero();
        padded.head(rep.values.size()) = rep.values;
        rep.values = padded;
        rep.sigma_min = 0.0;
    }
    rep.dense = true;
    return rep;
}

SingularReport singular_values(const ForwardMatrix& fm) {
    const long entries = fm.rows() * fm.cols();
    if (entries <= 60'000'000) return singular_values_dense(Mat(fm.a));

    // iterative fallback: extreme singular values of A via A^T A
    SingularReport rep;
    rep.dense = false;
    const auto& a = fm.a;
    Vec v = Vec::Ones(fm.cols()).normalized();
    double lam = 0.0;
    for (int it = 0; it < 300; ++it) {
        Vec w = a.transpose() * (a * v);
        const double nw = w.norm();
        if (nw == 0.0) break;
        w /= nw;
        const double lam_new = (a * w).squaredNorm();
        if (std::abs(lam_new - lam) <= 1e-12 * std::max(1.0, lam_new)) {
            lam = lam_new;
            v = w;
            break;
        }
        lam = lam_new;
        v = w;
    }
    rep.sigma_max = std::sqrt(lam);
    // inverse iteration with inner CG for sigma_min
    Vec u = Vec::Ones(fm.cols());
    u[0] += 0.5;
    u.normalize();
    double mu = 0.0;
    bool ok = true;
    for (int it = 0; it < 40 && ok; ++it) {
        Vec x = Vec::Zero(fm.cols());
        Vec r = u, p = r;
        double rs = r.squaredNorm();
        int inner = 0;
        for (; inner < 400; ++inner) {
            const Vec q = a.transpose() * (a * p);
            const double denom = p.dot(q);
            if (denom <= 0.0) break;
            const double alpha = rs / denom;
            x += alpha * p;
            r -= alpha * q;
            const double rs_new = r.squaredNorm();
            if (std::sqrt(rs_new) < 1e-10 * u.norm()) {
                rs = rs_new;
                break;
            }
            p = r + (rs_new / rs) * p;
            rs = rs_new;
        }
        if (inner >= 400) ok = false;
        const double nx = x.norm();
        if (nx == 0.0) {
            ok = false;
            break;
        }
        u = x / nx;
        mu = (a * u).squaredNorm();
    }
    rep.stagnated = !ok;
    rep.sigma_min = std::sqrt(mu);
    rep.values = Vec(2);
    rep.values << rep.sigma_max, rep.sigma_min;
    return rep;
}

CoverageReport coverage_report(const MetricField& field, const Domain& domain,
                               const GridSpec& grid, const RayFamily& family, double h,
                               int required_directions) {
    const auto support = support_mask(grid, domain);
    const int cap = std::max(2 * required_directions, 8);
    std::vector<std::vector<Vec>> dirs(grid.voxel_count());
    const int stride = std::max(1, static_cast<int>(std::floor(grid.cell() / (2.0 * h))));
    const double distinct = std::cos(5.0 * std::numbers::pi / 180.0);

    for (const auto& s : family.samples) {
        const GeodesicPath path = shoot_geodesic(field, domain, s.x, s.xi, h);
        if (!path.meets_M) continue;
        for (size_t i = 0; i < path.samples.size(); i += stride) {
            const Vec& z = path.samples[i].z;
            const long v = grid.locate(z);
            if (v < 0 || !support[v]) continue;
            auto& bucket = dirs[v];
            if (static_cast<int>(bucket.size()) >= cap) continue;
            const Vec d = path.samples[i].zeta.normalized();
            bool fresh = true;
            for (const Vec& b : bucket)
                if (std::abs(b.dot(d)) > distinct) {
                    fresh = false;
                    break;
                }
            if (fresh) bucket.push_back(d);
        }
    }
    CoverageReport rep;
    rep.min_distinct_directions = std::numeric_limits<int>::max();
    for (long v = 0; v < grid.voxel_count(); ++v) {
        if (!support[v]) continue;
        ++rep.support_voxels;
        const int c = static_cast<int>(dirs[v].size());
        if (c > 0) ++rep.covered_voxels;
        if (c < rep.min_distinct_directions) {
            rep.min_distinct_directions = c;
            rep.worst_voxel = v;
        }
    }
    if (rep.support_voxels == 0) rep.min_distinct_directions = 0;
    return rep;
}

InjectivityReport injectivity_probe(const MetricField& field, const Domain& domain,
                                    const GridSpec& grid, const RayFamily& family,
                                    const SpanningSet& spanning, double h,
                                    double ratio_threshold) {
    InjectivityReport rep;
    rep.coverage = coverage_report(field, domain, grid, family, h, spanning.count());
    const ForwardMatrix fm = assemble_forward(field, domain, grid, family, spanning, h);
    rep.rows = fm.rows();
    rep.cols = fm.cols();
    rep.svd = singular_values(fm);
    rep.ratio = rep.svd.sigma_max > 0.0 ? rep.svd.sigma_min / rep.svd.sigma_max : 0.0;
    rep.pass = rep.ratio > ratio_threshold &&
               rep.coverage.min_distinct_directions >= spanning.count();
    return rep;
}

namespace {

// closed-form smooth field used by the dimension-2 identity checks
Mat dim2_bump_field(const Vec& x) {
    const double g1 = std::exp(-((x[0] - 0.2) * (x[0] - 0.2) + x[1] * x[1]) / 0.18);
    const double g2 = std::exp(-((x[0] + 0.1) * (x[0] + 0.1) + (x[1] - 0.25) * (x[1] - 0.25)) /
                               0.22);
    Mat f(2, 2);
    f(0, 0) = 0.8 * g1 + 0.1 * g2;
    f(1, 1) = -0.4 * g1 + 0.5 * g2;
    f(0, 1) = 0.3 * g1 - 0.2 * g2;
    f(1, 0) = f(0, 1);
    return f;
}

// potential-type generator: w vanishes on the boundary of the disk
Vec dim2_generator(const Domain& domain, const Vec& x) {
    const double cut = domain.rho * domain.rho - x.squaredNorm();
    Vec w(2);
    w[0] = cut * (0.3 + 0.2 * x[0] - 0.1 * x[1]);
    w[1] = cut * (-0.15 + 0.25 * x[0] * x[1]);
    return w;
}

Mat dim2_potential_field(const Domain& domain, const Vec& x) {
    // f = R sym(grad w) R^T with R the quarter rotation; then f(eta, eta)
    // along a chord integrates d/dt <w, gamma'> and vanishes
    const double fd = 1e-6;
    Mat grad(2, 2);  // grad(i, j) = d_i w_j
    for (int i = 0; i < 2; ++i) {
        Vec xp = x, xm = x;
        xp[i] += fd;
        xm[i] -= fd;
        const Vec wp = dim2_generator(domain, xp), wm = dim2_generator(domain, xm);
        for (int j = 0; j < 2; ++j) grad(i, j) = (wp[j] - wm[j]) / (2.0 * fd);
    }
    Mat sym = 0.5 * (grad + grad.transpose());
    Mat r(2, 2);
    r << 0.0, -1.0, 1.0, 0.0;
    Mat f = r * sym * r.transpose();
    return f;
}

}  // namespace

Dim2Report dim2_kernel_probe(const MetricField& field, const Domain& domain,
                             const GridSpec& grid, const RayFamily& family, double h) {
    if (domain.n != 2) throw std::invalid_argument("dim2_kernel_probe: requires n = 2");
    Dim2Report rep;
    const ForwardMatrix fm = assemble_forward(field, domain, grid, family, std::nullopt, h);
    rep.rows = fm.rows();
    rep.cols = fm.cols();
    rep.svd = singular_values(fm);
    rep.near_null = rep.svd.near_null_count(1e-8);

    // row-wise identity: TRT datum vs geodesic ray transform of R f R^T
    const SymTensorField2 f =
        SymTensorField2::closed_form(domain, [](const Vec& x) { return dim2_bump_field(x); });
    Mat rot(2, 2);
    rot << 0.0, -1.0, 1.0, 0.0;
    const int check = std::min<int>(25, static_cast<int>(family.samples.size()));
    for (int r = 0; r < check; ++r) {
        const auto& smp = family.samples[r];
        const GeodesicPath path = shoot_geodesic(field, domain, smp.x, smp.xi, h);
        if (!path.meets_M) continue;
        const auto normals = gram_schmidt_frame(field, smp.x, path.samples.front().zeta);
        const TransportedVector tv = parallel_transport(field, path, normals[0]);
        const double trt_val = trt_scalar(field, domain, f, path, tv);
        // independent integrand: (R f R^T)(gamma', gamma') over the same segment
        const int m = simpson_subdivisions(path.t_exit - path.t_enter, h);
        const double dt = (path.t_exit - path.t_enter) / m;
        double grt = 0.0;
        for (int j = 0; j <= m; ++j) {
            const PathState s = geodesic_state_at(field, path, path.t_enter + j * dt);
            const Mat g = rot * f.value(s.z) * rot.transpose();
            const double w = (j == 0 || j == m) ? 1.0 : (j % 2 ? 4.0 : 2.0);
            grt += w * s.zeta.dot(g * s.zeta);
        }
        grt *= dt / 3.0;
        rep.row_identity_max_err = std::max(rep.row_identity_max_err, std::abs(trt_val - grt));
    }

    // potential-type field: data should vanish
    const SymTensorField2 fp = SymTensorField2::closed_form(
        domain, [&domain](const Vec& x) { return dim2_potential_field(domain, x); });
    double data_sq = 0.0;
    int data_n = 0;
    for (const auto& smp : family.samples) {
        const GeodesicPath path = shoot_geodesic(field, domain, smp.x, smp.xi, h);
        if (!path.meets_M) continue;
        const auto normals = gram_schmidt_frame(field, smp.x, path.samples.front().zeta);
        const TransportedVector tv = parallel_transport(field, path, normals[0]);
        const double v = trt_scalar(field, domain, fp, path, tv);
        data_sq += v * v;
        ++data_n;
    }
    double field_sq = 0.0;
    long field_n = 0;
    const auto support = support_mask(grid, domain);
    for (long v = 0; v < grid.voxel_count(); ++v) {
        if (!support[v]) continue;
        field_sq += fp.value(grid.center(v)).squaredNorm();
        ++field_n;
    }
    const double data_norm = data_n ? std::sqrt(data_sq / data_n) : 0.0;
    const double field_norm = field_n ? std::sqrt(field_sq / field_n) : 1.0;
    rep.potential_ratio = data_norm / field_norm;

    rep.pass = rep.near_null >= 1 && rep.row_identity_max_err < 1e-8 &&
               rep.potential_ratio < 1e-6;
    return rep;
}

ConeFamily cone_family(const MetricField& field, const Vec& apex, const Vec& center_dir,
                       double aperture, int count) {
    if (!(aperture > 0.0)) throw std::invalid_argument("cone_family: aperture must be > 0");
    if (count < 1) throw std::invalid_argument("cone_family: count must be >= 1");
    const int n = field.dim();
    ConeFamily cone;
    cone.apex = apex;
    cone.center_dir = field.normalized(apex, center_dir);
    cone.aperture = aperture;
    cone.dirs.push_back(cone.center_dir);
    if (count == 1) return cone;

    const auto frame = gs_complete(field, apex, {cone.center_dir});
    const double cb = std::cos(aperture), sb = std::sin(aperture);
    const int ring = count - 1;
    for (int j = 0; j < ring; ++j) {
        Vec d = cb * frame[0];
        if (n == 2) {
            d += (j % 2 == 0 ? sb : -sb) * frame[1];
        } else {
            // ring at the full aperture, azimuth 0 included
            const double psi = 2.0 * std::numbers::pi * j / ring;
            d += sb * std::cos(psi) * frame[1];
            d += sb * std::sin(psi) * frame[2];
        }
        cone.dirs.push_back(d);
    }
    return cone;
}

std::pair<Vec, Vec> DeformationPath::at(const MetricField& field, const Domain& domain,
                                        double t) const {
    auto slerp = [](const Vec& a, const Vec& b, double u) {
        const double c = std::clamp(a.normalized().dot(b.normalized()), -1.0, 1.0);
        const double ang = std::acos(c);
        if (ang < 1e-12) return Vec(a.normalized());
        const double s = std::sin(ang);
        return Vec((std::sin((1.0 - u) * ang) / s) * a.normalized() +
                   (std::sin(u * ang) / s) * b.normalized());
    };
    const Vec x = domain.rho_ext * slerp(x0, x1, t);
    const Vec th = field.normalized(x, slerp(theta0, theta1, t));
    return {x, th};
}

SupportScenario1 support_scenario1(const MetricField& field, const Domain& domain,
                                   const SymTensorField2& f_true, const RayFamily& family,
                                   double h, double tol) {
    SupportScenario1 rep;
    for (const auto& smp : family.samples) {
        const GeodesicPath path = shoot_geodesic(field, domain, smp.x, smp.xi, h);
        ++rep.rays;
        if (!path.meets_M) continue;
        const auto normals = gram_schmidt_frame(field, smp.x, path.samples.front().zeta);
        // probe the full transverse block: frame vectors and their sums
        std::vector<Vec> dirs = normals;
        for (size_t a = 0; a < normals.size(); ++a)
            for (size_t b = a + 1; b < normals.size(); ++b)
                dirs.push_back(((normals[a] + normals[b]) / std::sqrt(2.0)).eval());
        for (const Vec& d : dirs) {
            const TransportedVector tv = parallel_transport(field, path, d);
            const double v = trt_scalar(field, domain, f_true, path, tv);
            rep.max_abs_data = std::max(rep.max_abs_data, std::abs(v));
        }
    }
    rep.pass = rep.max_abs_data < tol;
    return rep;
}

SupportScenario2 support_scenario2(const MetricField& field, const Domain& domain,
                                   const GridSpec& grid, const RayFamily& family,
                                   const std::optional<SpanningSet>& spanning, double h,
                                   double lambda, int iters, double ratio_threshold,
                                   double recon_tol) {
    SupportScenario2 rep;
    const auto mask = coverage_mask(field, domain, grid, family, h);
    long covered = 0;
    for (uint8_t m : mask) covered += m;
    if (covered == 0)
        throw std::runtime_error("support_scenario2: empty M_A mask, check the family");
    rep.mask_voxels = covered;
    const ForwardMatrix fm = assemble_forward(field, domain, grid, family, spanning, h, &mask);
    rep.rows = fm.rows();
    rep.cols = fm.cols();
    rep.svd = singular_values(fm);
    rep.ratio = rep.svd.sigma_max > 0.0 ? rep.svd.sigma_min / rep.svd.sigma_max : 0.0;
    const Vec zero_data = Vec::Zero(fm.rows());
    const SolveResult sol = solve_tikhonov(fm, zero_data, lambda, iters);
    rep.recon_norm = sol.x.norm();
    rep.pass = rep.ratio > ratio_threshold && rep.recon_norm < recon_tol;
    return rep;
}

SupportScenario3 support_scenario3(const MetricField& field, const Domain& domain,
                                   const GridSpec& grid, const SymTensorField2& f_true,
                                   const DeformationPath& def, double aperture,
                                   int members_per_cone, double h) {
    // support mask of f_true on the grid
    std::vector<uint8_t> mask(grid.voxel_count(), 0);
    for (long v = 0; v < grid.voxel_count(); ++v)
        if (f_true.value(grid.center(v)).norm() > 0.0) mask[v] = 1;

    SupportScenario3 rep;
    rep.step = 1.0 / def.steps;
    const double h_trace = std::max(h, grid.cell() / 8.0);
    int contact = -1;
    for (int j = def.steps; j >= 0; --j) {
        const double t = static_cast<double>(j) / def.steps;
        const auto [x, th] = def.at(field, domain, t);
        const ConeFamily cone = cone_family(field, x, th, aperture, members_per_cone);
        bool hit = false;
        for (const Vec& d : cone.dirs) {
            const GeodesicPath path = shoot_geodesic(field, domain, x, d, h_trace);
            for (const auto& s : path.samples) {
                const long v = grid.locate(s.z);
                if (v >= 0 && mask[v]) {
                    hit = true;
                    break;
                }
            }
            if (hit) break;
        }
        if (hit) {
            contact = j;
            break;
        }
    }
    rep.contact_step = contact;
    rep.t1 = contact < 0 ? 0.0 : static_cast<double>(contact) / def.steps;
    return rep;
}

}  // namespace trt
