#include "trt/runner.hpp"

#include "trt/frames.hpp"
#include "trt/lab.hpp"
#include "trt/parallel.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

namespace trt {

namespace {

namespace fs = std::filesystem;

MetricField metric_from(const ExperimentConfig& cfg) {
    if (cfg.metric_kind == "conformal") return MetricField::conformal(cfg.n, cfg.conformal_a);
    return MetricField::euclidean(cfg.n);
}

Domain domain_from(const ExperimentConfig& cfg) { return Domain(cfg.n, cfg.rho, cfg.rho_ext); }

Vec to_vec(const std::vector<double>& v) {
    Vec out(static_cast<long>(v.size()));
    for (size_t i = 0; i < v.size(); ++i) out[i] = v[i];
    return out;
}

std::string out_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void write_singulars(const SingularReport& svd, const std::string& path) {
    CsvWriter w(path);
    w.header({"index", "sigma"});
    for (long i = 0; i < svd.values.size(); ++i) {
        w.cell(i);
        w.cell(svd.values[i]);
        w.end_row();
    }
}

void write_reconstruction(const ForwardMatrix& fm, const std::vector<double>& comps,
                          const std::string& path) {
    const int n = fm.grid.n;
    const int nc = sym_component_count(n);
    std::vector<std::string> head{"voxel"};
    for (int i = 1; i <= n; ++i) head.push_back("i" + std::to_string(i));
    for (int i = 1; i <= n; ++i)
        for (int j = i; j <= n; ++j)
            head.push_back("f" + std::to_string(i) + std::to_string(j));
    CsvWriter w(path);
    w.header(head);
    for (long c = 0; c < fm.cols(); c += nc) {
        const long v = fm.col_voxel[c];
        w.cell(v);
        for (int i : fm.grid.multi_index(v)) w.cell(static_cast<long>(i));
        for (int k = 0; k < nc; ++k) w.cell(comps[v * nc + k]);
        w.end_row();
    }
}

RayFamilySpec family_spec_from(const ExperimentConfig& cfg) {
    RayFamilySpec spec;
    spec.count = cfg.family_count;
    spec.dir_cap = cfg.dir_cap;
    if (!cfg.avoid_center.empty() && cfg.avoid_radius > 0.0)
        spec.avoid = AvoidBall{to_vec(cfg.avoid_center), cfg.avoid_radius};
    return spec;
}

// smooth compactly supported bump, C^3 at the support edge
double bump(const Vec& x, const Vec& center, double radius) {
    const double r2 = (x - center).squaredNorm() / (radius * radius);
    if (r2 >= 1.0) return 0.0;
    const double s = 1.0 - r2;
    return s * s * s * s;
}

SymTensorField2 ball_bump_field(const Domain& domain, const Vec& center, double radius) {
    const int n = domain.n;
    Mat shape(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) shape(i, j) = 1.0 / (1.0 + i + j) + (i == j ? 0.5 : 0.0);
    shape = (0.5 * (shape + shape.transpose())).eval();
    return SymTensorField2::closed_form(
        domain, [center, radius, shape](const Vec& x) -> Mat {
            return bump(x, center, radius) * shape;
        });
}

void run_forward(const ExperimentConfig& cfg, const std::string& out_dir, RunReport& rep) {
    const MetricField field = metric_from(cfg);
    const Domain domain = domain_from(cfg);
    const GridSpec grid(cfg.n, cfg.grid_resolution, cfg.rho);
    std::vector<double> comps;
    if (!cfg.field_path.empty())
        comps = read_field_csv(cfg.field_path, cfg.n, cfg.grid_resolution);
    else
        comps = synthesize_phantom(cfg, cfg.grid_resolution);

    std::optional<SpanningSet> spanning;
    if (cfg.n >= 3) spanning = build_spanning_set(cfg.n);
    const RayFamily family = sample_ray_family(field, domain, family_spec_from(cfg), cfg.ode_h);
    const ForwardMatrix fm =
        assemble_forward(field, domain, grid, family, spanning, cfg.ode_h);
    const Vec data = fm.a * gather_columns(fm, comps);

    CsvWriter w(out_path(out_dir, "data.csv"));
    w.header({"ray", "eta", "value"});
    for (long r = 0; r < fm.rows(); ++r) {
        w.cell(static_cast<long>(fm.row_ray[r]));
        w.cell(static_cast<long>(fm.row_dir[r]));
        w.cell(data[r]);
        w.end_row();
    }
    long zero_rows = 0;
    for (uint8_t z : fm.zero_row) zero_rows += z;
    rep.metric("rays", static_cast<double>(family.samples.size()));
    rep.metric("rows", static_cast<double>(fm.rows()));
    rep.metric("zero_rows", static_cast<double>(zero_rows));
    rep.metric("data_norm", data.norm());
}

void run_adjoint_test(const ExperimentConfig& cfg, const std::string& out_dir, RunReport& rep) {
    const MetricField field = metric_from(cfg);
    const Domain domain = domain_from(cfg);
    const int n = cfg.n;

    // fixed smooth test field supported strictly inside M
    Vec p1 = Vec::Ones(n).normalized() * (0.25 * cfg.rho);
    Vec p2(n);
    for (int i = 0; i < n; ++i) p2[i] = (i % 2 ? -1.0 : 1.0);
    p2 = p2.normalized() * (0.2 * cfg.rho);
    Mat s1(n, n), s2(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            s1(i, j) = 0.8 / (1.0 + i + j);
            s2(i, j) = 0.3 * ((i + j) % 2 ? -1.0 : 1.0) / (1.0 + std::abs(i - j));
        }
    s1 = (0.5 * (s1 + s1.transpose())).eval();
    s2 = (0.5 * (s2 + s2.transpose())).eval();
    const double r1 = 0.4 * cfg.rho, r2 = 0.35 * cfg.rho;
    const SymTensorField2 f = SymTensorField2::closed_form(
        domain, [=](const Vec& x) -> Mat {
            return bump(x, p1, r1) * s1 + bump(x, p2, r2) * s2;
        });

    Vec q1 = Vec::Ones(n).normalized();
    Vec q2 = Vec::Zero(n);
    q2[0] = 0.6;
    q2[n - 1] = -0.8;
    Mat t1 = Mat::Identity(n, n);
    t1(0, n - 1) = t1(n - 1, 0) = 0.4;
    Mat t2 = Mat::Zero(n, n);
    t2(0, 0) = 1.0;
    t2(n - 1, n - 1) = -0.6;
    t2(0, 1) = t2(1, 0) = 0.3;
    BoundaryTensorField phi;
    phi.eval = [=, &domain](const Vec& x, const Vec& xi) -> Mat {
        const double a = 0.6 + 0.25 * q1.dot(x) / domain.rho_ext;
        const double b = 0.1 + 0.3 * std::pow(q2.dot(xi), 2);
        return a * t1 + b * t2;
    };

    // Gamma_- side
    const auto samples = influx_samples(field, domain, cfg.boundary_count, cfg.direction_count);
    std::vector<double> lhs_terms(samples.size());
    parallel_for(static_cast<int>(samples.size()), [&](int i) {
        const auto& s = samples[i];
        const Mat jt = trt_tensor(field, domain, f, s.x, s.xi, cfg.ode_h);
        lhs_terms[i] =
            s.weight * s.santalo * tensor_pairing(field, s.x, jt, phi.value(s.x, s.xi));
    });
    double lhs = 0.0;
    for (double v : lhs_terms) lhs += v;

    // volume side over cells where f is nonzero at the center
    const GridSpec grid(n, cfg.grid_resolution, cfg.rho);
    std::vector<long> active;
    for (long v = 0; v < grid.voxel_count(); ++v)
        if (f.value(grid.center(v)).norm() > 0.0) active.push_back(v);
    std::vector<double> rhs_terms(active.size());
    const double cell_vol = std::pow(grid.cell(), n);
    parallel_for(static_cast<int>(active.size()), [&](int i) {
        const Vec x = grid.center(active[i]);
        const Mat adj = adjoint_apply(phi, field, domain, x, cfg.sphere_count, cfg.ode_h);
        const double dens = std::sqrt(field.metric(x).determinant());
        rhs_terms[i] = cell_vol * dens * tensor_pairing(field, x, f.value(x), adj);
    });
    double rhs = 0.0;
    for (double v : rhs_terms) rhs += v;

    const double rel = std::abs(lhs - rhs) / std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    CsvWriter w(out_path(out_dir, "adjoint.csv"));
    w.header({"pairing_influx", "pairing_volume", "rel_error"});
    w.cell(lhs);
    w.cell(rhs);
    w.cell(rel);
    w.end_row();
    rep.metric("pairing_influx", lhs);
    rep.metric("pairing_volume", rhs);
    rep.check_less("adjoint_rel_error", rel, 1e-2);
}

void run_spanning(const ExperimentConfig& cfg, const std::string& out_dir, RunReport& rep) {
    if (cfg.n < 3) throw std::runtime_error("spanning: requires domain.n >= 3");
    const SpanningSet set = build_spanning_set(cfg.n);
    const int n = cfg.n;
    {
        std::vector<std::string> head{"k", "case", "p", "q", "a_p", "a_q"};
        for (int i = 1; i <= n; ++i) head.push_back("eta_" + std::to_string(i));
        for (int i = 1; i <= n; ++i) head.push_back("witness_" + std::to_string(i));
        CsvWriter w(out_path(out_dir, "spanning_members.csv"));
        w.header(head);
        for (int k = 0; k < set.count(); ++k) {
            const auto& m = set.members[k];
            w.cell(static_cast<long>(k));
            w.cell(static_cast<long>(m.case_id));
            w.cell(static_cast<long>(m.p));
            w.cell(static_cast<long>(m.q));
            w.cell(m.a_p);
            w.cell(m.a_q);
            for (int i = 0; i < n; ++i) w.cell(m.eta[i]);
            for (int i = 0; i < n; ++i) w.cell(m.witness[i]);
            w.end_row();
        }
    }
    {
        CsvWriter w(out_path(out_dir, "spanning_gram_eigenvalues.csv"));
        w.header({"index", "eigenvalue"});
        for (int i = 0; i < set.gram_eigs.size(); ++i) {
            w.cell(static_cast<long>(i));
            w.cell(set.gram_eigs[i]);
            w.end_row();
        }
    }
    double max_wit = 0.0;
    for (const auto& m : set.members) {
        max_wit = std::max(max_wit, std::abs(m.witness.dot(m.eta)));
        max_wit = std::max(max_wit, std::abs(m.witness.dot(set.xi0)));
    }
    rep.metric("members", set.count());
    rep.metric("gram_min_eigenvalue", set.gram_eigs.minCoeff());
    rep.metric("eps", set.eps);
    rep.check_less("witness_residual", max_wit, 1e-10);
    rep.check_greater("gram_rank", set.rank(), set.count() - 0.5);
}

void run_inject_probe(const ExperimentConfig& cfg, const std::string& out_dir, RunReport& rep) {
    if (cfg.n < 3) throw std::runtime_error("inject-probe: requires domain.n >= 3");
    const MetricField field = metric_from(cfg);
    const Domain domain = domain_from(cfg);
    const GridSpec grid(cfg.n, cfg.grid_resolution, cfg.rho);
    const SpanningSet spanning = build_spanning_set(cfg.n);
    const RayFamily family = sample_ray_family(field, domain, family_spec_from(cfg), cfg.ode_h);
    const InjectivityReport pr =
        injectivity_probe(field, domain, grid, family, spanning, cfg.ode_h);
    write_singulars(pr.svd, out_path(out_dir, "singular_values.csv"));
    rep.metric("rows", static_cast<double>(pr.rows));
    rep.metric("cols", static_cast<double>(pr.cols));
    rep.metric("sigma_min", pr.svd.sigma_min);
    rep.metric("sigma_max", pr.svd.sigma_max);
    rep.check_greater("coverage_min_directions", pr.coverage.min_distinct_directions,
                      spanning.count() - 0.5);
    rep.check_greater("sigma_ratio", pr.ratio, 1e-6);
}

void run_dim2_probe(const ExperimentConfig& cfg, const std::string& out_dir, RunReport& rep) {
    if (cfg.metric_kind != "euclidean")
        throw std::runtime_error("dim2-probe: defined for the Euclidean disk");
    ExperimentConfig c2 = cfg;
    c2.n = 2;
    const MetricField field = metric_from(c2);
    const Domain domain(2, c2.rho, c2.rho_ext);
    const GridSpec grid(2, c2.grid_resolution, c2.rho);
    // matched ray budget: two rays per support voxel unless explicitly set
    long support_voxels = 0;
    for (uint8_t m : support_mask(grid, domain)) support_voxels += m;
    RayFamilySpec spec = family_spec_from(c2);
    if (!cfg.family_count_explicit)
        spec.count = static_cast<int>(2 * support_voxels);
    const RayFamily family = sample_ray_family(field, domain, spec, c2.ode_h);
    const Dim2Report pr = dim2_kernel_probe(field, domain, grid, family, c2.ode_h);
    write_singulars(pr.svd, out_path(out_dir, "singular_values.csv"));
    rep.metric("rows", static_cast<double>(pr.rows));
    rep.metric("cols", static_cast<double>(pr.cols));
    rep.metric("sigma_max", pr.svd.sigma_max);
    rep.check_greater("near_null_count", pr.near_null, 0.5);
    rep.check_less("row_identity_error", pr.row_identity_max_err, 1e-8);
    rep.check_less("potential_data_ratio", pr.potential_ratio, 1e-6);
}

void run_support_exp(const ExperimentConfig& cfg, const std::string& out_dir, RunReport& rep) {
    const MetricField field = metric_from(cfg);
    const Domain domain = domain_from(cfg);
    const GridSpec grid(cfg.n, cfg.grid_resolution, cfg.rho);
    const Vec center = to_vec(cfg.support_center_or_default());
    const SymTensorField2 f_true = ball_bump_field(domain, center, cfg.support_radius);

    RayFamilySpec spec = family_spec_from(cfg);
    spec.avoid = AvoidBall{center, cfg.support_avoid_radius};
    const RayFamily family = sample_ray_family(field, domain, spec, cfg.ode_h);

    const SupportScenario1 s1 =
        support_scenario1(field, domain, f_true, family, cfg.ode_h, 1e-10);
    rep.metric("s1_rays", s1.rays);
    rep.check_less("s1_max_abs_data", s1.max_abs_data, 1e-10);

    std::optional<SpanningSet> spanning;
    if (cfg.n >= 3) spanning = build_spanning_set(cfg.n);
    const SupportScenario2 s2 = support_scenario2(field, domain, grid, family, spanning,
                                                  cfg.ode_h, cfg.lambda, cfg.iters, 1e-6, 1e-6);
    write_singulars(s2.svd, out_path(out_dir, "singular_values.csv"));
    {
        // reconstruction on the restricted mask (zero data -> zero field)
        const auto mask = coverage_mask(field, domain, grid, family, cfg.ode_h);
        const ForwardMatrix fm =
            assemble_forward(field, domain, grid, family, spanning, cfg.ode_h, &mask);
        write_reconstruction(fm, scatter_columns(fm, Vec::Zero(fm.cols())),
                             out_path(out_dir, "reconstruction.csv"));
    }
    rep.metric("s2_mask_voxels", static_cast<double>(s2.mask_voxels));
    rep.metric("s2_rows", static_cast<double>(s2.rows));
    rep.metric("s2_cols", static_cast<double>(s2.cols));
    rep.check_greater("s2_sigma_ratio", s2.ratio, 1e-6);
    rep.check_less("s2_recon_norm", s2.recon_norm, 1e-6);

    // scenario 3: rotate a cone away from the support ball around a fixed apex
    const Vec chat = center.normalized();
    Vec seed = Vec::Zero(cfg.n);
    seed[1 % cfg.n] = 1.0;
    Vec u = seed - chat * chat.dot(seed);
    if (u.norm() < 1e-8) {
        seed.setZero();
        seed[0] = 1.0;
        u = seed - chat * chat.dot(seed);
    }
    u.normalize();
    const Vec apex = -domain.rho_ext * u;
    const Vec v = (center - apex).normalized();
    Vec w = -u - v * v.dot(-u);
    w.normalize();
    const double d = (center - apex).norm();
    const double contact_angle = cfg.aperture + std::asin(cfg.support_radius / d);
    const double psi_max = std::min(1.2, 2.5 * contact_angle);
    DeformationPath def;
    def.x0 = apex;
    def.x1 = apex;
    def.theta0 = v;
    def.theta1 = std::cos(psi_max) * v + std::sin(psi_max) * w;
    def.steps = cfg.deform_steps;
    const int mask_res = cfg.n == 2 ? 32 : (cfg.n == 3 ? 24 : 10);
    const GridSpec mask_grid(cfg.n, std::max(cfg.grid_resolution, mask_res), cfg.rho);
    const SupportScenario3 s3 = support_scenario3(field, domain, mask_grid, f_true, def,
                                                  cfg.aperture, 24, cfg.ode_h);
    const double t1_analytic = contact_angle / psi_max;
    rep.metric("s3_t1", s3.t1);
    rep.metric("s3_t1_analytic", t1_analytic);
    rep.metric("s3_step", s3.step);
    rep.check_less("s3_t1_error", std::abs(s3.t1 - t1_analytic), s3.step * 1.000001);
}

void run_invert(const ExperimentConfig& cfg, const std::string& out_dir, RunReport& rep) {
    const MetricField field = metric_from(cfg);
    const Domain domain = domain_from(cfg);
    const GridSpec grid(cfg.n, cfg.grid_resolution, cfg.rho);
    std::vector<double> truth;
    if (!cfg.field_path.empty())
        truth = read_field_csv(cfg.field_path, cfg.n, cfg.grid_resolution);
    else
        truth = synthesize_phantom(cfg, cfg.grid_resolution);

    std::optional<SpanningSet> spanning;
    if (cfg.n >= 3) spanning = build_spanning_set(cfg.n);
    const RayFamily family = sample_ray_family(field, domain, family_spec_from(cfg), cfg.ode_h);
    const ForwardMatrix fm = assemble_forward(field, domain, grid, family, spanning, cfg.ode_h);
    const Vec x_true = gather_columns(fm, truth);
    const Vec data = fm.a * x_true;
    const SolveResult sol = solve_tikhonov(fm, data, cfg.lambda, cfg.iters, cfg.tol);
    const double rel =
        x_true.norm() > 0.0 ? (sol.x - x_true).norm() / x_true.norm() : sol.x.norm();

    write_reconstruction(fm, scatter_columns(fm, sol.x), out_path(out_dir, "reconstruction.csv"));
    {
        CsvWriter w(out_path(out_dir, "residual_history.csv"));
        w.header({"iteration", "objective"});
        for (size_t i = 0; i < sol.objective.size(); ++i) {
            w.cell(static_cast<long>(i));
            w.cell(sol.objective[i]);
            w.end_row();
        }
    }
    rep.metric("rows", static_cast<double>(fm.rows()));
    rep.metric("cols", static_cast<double>(fm.cols()));
    rep.metric("iterations", sol.iterations);
    rep.metric("final_residual", sol.final_residual);
    rep.metric("converged", sol.converged ? 1.0 : 0.0);
    rep.check_less("recovery_rel_error", rel, 1e-3);
}

}  // namespace

bool is_known_command(const std::string& name) {
    for (const char* c : kCommands)
        if (name == c) return true;
    return false;
}

std::vector<double> synthesize_phantom(const ExperimentConfig& cfg, int res) {
    const GridSpec grid(cfg.n, res, cfg.rho);
    const Domain domain = domain_from(cfg);
    const int nc = sym_component_count(cfg.n);
    std::mt19937_64 rng(static_cast<uint64_t>(cfg.seed));
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    struct Bump {
        Vec c;
        double w, a;
    };
    std::vector<std::vector<Bump>> bumps(nc);
    for (int comp = 0; comp < nc; ++comp) {
        for (int b = 0; b < 3; ++b) {
            Bump bp;
            bp.c = Vec(cfg.n);
            for (int i = 0; i < cfg.n; ++i) bp.c[i] = 0.6 * cfg.rho * uni(rng);
            bp.w = (0.3 + 0.15 * std::abs(uni(rng))) * cfg.rho;
            bp.a = uni(rng);
            bumps[comp].push_back(bp);
        }
    }
    std::vector<double> comps(grid.voxel_count() * nc, 0.0);
    const auto mask = support_mask(grid, domain);
    for (long v = 0; v < grid.voxel_count(); ++v) {
        if (!mask[v]) continue;
        const Vec x = grid.center(v);
        for (int comp = 0; comp < nc; ++comp) {
            double s = 0.0;
            for (const auto& bp : bumps[comp])
                s += bp.a * std::exp(-(x - bp.c).squaredNorm() / (bp.w * bp.w));
            comps[v * nc + comp] = s;
        }
    }
    return comps;
}

RunReport run_command(const std::string& name, const ExperimentConfig& cfg,
                      const std::string& out_dir) {
    if (!is_known_command(name)) throw std::runtime_error("unknown command: " + name);
    fs::create_directories(out_dir);
    RunReport rep;
    rep.command = name;
    rep.hash = config_hash(cfg);
    const auto start = std::chrono::steady_clock::now();

    {
        std::ofstream echo(out_path(out_dir, "config_echo.cfg"), std::ios::binary);
        echo << serialize_config(cfg);
    }

    if (name == "forward")
        run_forward(cfg, out_dir, rep);
    else if (name == "adjoint-test")
        run_adjoint_test(cfg, out_dir, rep);
    else if (name == "spanning")
        run_spanning(cfg, out_dir, rep);
    else if (name == "inject-probe")
        run_inject_probe(cfg, out_dir, rep);
    else if (name == "dim2-probe")
        run_dim2_probe(cfg, out_dir, rep);
    else if (name == "support-exp")
        run_support_exp(cfg, out_dir, rep);
    else if (name == "invert")
        run_invert(cfg, out_dir, rep);

    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_report_csv(rep, out_path(out_dir, "report.csv"));
    return rep;
}

}  // namespace trt
