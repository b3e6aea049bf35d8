#pragma once
// Discretized inversion laboratory: sparse forward operator over voxel
// grids and ray families, Tikhonov least squares, singular-value probes,
// the dimension-2 kernel contrast, and support-theorem experiments.

#include "trt/frames.hpp"
#include "trt/transform.hpp"

#include <Eigen/SparseCore>
#include <optional>

namespace trt {

struct AvoidBall {
    Vec center;
    double radius = 0.0;
};

// Open family of geodesics, realized as strictly interior quasi-uniform
// samples of a parameter box (boundary chart x inward-direction chart).
struct RayFamilySpec {
    int count = 512;
    double dir_cap = 1.1;  // max polar angle of the inward direction (rad)
    std::optional<AvoidBall> avoid;
};

struct RayFamily {
    std::vector<InfluxSample> samples;
};

// Halton-sampled family; members violating the avoidance region (checked
// sample-wise along the traced geodesic) are dropped and replaced.
RayFamily sample_ray_family(const MetricField& field, const Domain& domain,
                            const RayFamilySpec& spec, double h);

// M_A voxel mask: voxels whose center lies within half a voxel diagonal of
// some sample point of some member.
std::vector<uint8_t> coverage_mask(const MetricField& field, const Domain& domain,
                                   const GridSpec& grid, const RayFamily& family, double h);

struct ForwardMatrix {
    Eigen::SparseMatrix<double, Eigen::RowMajor> a;
    GridSpec grid;
    int n_dirs = 0;                    // rows per ray
    std::vector<long> col_voxel;       // column -> voxel flat id
    std::vector<int> col_comp;         // column -> component index
    std::vector<long> voxel_col_base;  // voxel flat id -> first column, -1 outside support
    std::vector<int> row_ray;          // row -> ray id
    std::vector<int> row_dir;          // row -> direction index
    std::vector<uint8_t> zero_row;     // rays missing M keep their (flagged) zero rows

    long rows() const { return a.rows(); }
    long cols() const { return a.cols(); }
};

// Assembles Simpson-weighted rows eta_k^i eta_k^j against the voxel
// component basis. For n >= 3 the per-ray directions are the spanning-set
// members mapped to the ray's transported frame and projected transverse;
// for n = 2 the single direction is the parallel rotation of the velocity.
// Unknown columns are restricted to voxels inside M.
ForwardMatrix assemble_forward(const MetricField& field, const Domain& domain,
                               const GridSpec& grid, const RayFamily& family,
                               const std::optional<SpanningSet>& spanning, double h,
                               const std::vector<uint8_t>* column_mask = nullptr);

// Gathers a full component vector (all voxels) into the matrix columns.
Vec gather_columns(const ForwardMatrix& fm, const std::vector<double>& comps);
// Scatters a column vector back to a full voxel component buffer.
std::vector<double> scatter_columns(const ForwardMatrix& fm, const Vec& x);

struct SolveResult {
    Vec x;
    std::vector<double> objective;  // |Ax-d|^2 + lambda |x|^2 per iteration
    bool converged = false;
    int iterations = 0;
    double final_residual = 0.0;  // |A^T(d - Ax) - lambda x| / |A^T d|
};

// Conjugate gradient on the regularized normal equations.
SolveResult solve_tikhonov(const ForwardMatrix& fm, const Vec& data, double lambda, int iters,
                           double tol = 1e-10);

struct SingularReport {
    Vec values;  // descending
    double sigma_min = 0.0, sigma_max = 0.0;
    bool dense = true;
    bool stagnated = false;
    int near_null_count(double rel_tol) const;
};

// Dense SVD when the matrix is desk-sized, power/inverse iteration on A^T A
// otherwise (values then hold sigma_max and sigma_min only).
SingularReport singular_values(const ForwardMatrix& fm);
SingularReport singular_values_dense(const Mat& m);

struct CoverageReport {
    int min_distinct_directions = 0;
    long worst_voxel = -1;
    long covered_voxels = 0;
    long support_voxels = 0;
};

// Distinct-direction coverage heuristic over support voxels.
CoverageReport coverage_report(const MetricField& field, const Domain& domain,
                               const GridSpec& grid, const RayFamily& family, double h,
                               int required_directions);

struct InjectivityReport {
    CoverageReport coverage;
    SingularReport svd;
    double ratio = 0.0;
    bool pass = false;
    long rows = 0, cols = 0;
};

InjectivityReport injectivity_probe(const MetricField& field, const Domain& domain,
                                    const GridSpec& grid, const RayFamily& family,
                                    const SpanningSet& spanning, double h,
                                    double ratio_threshold = 1e-6);

struct Dim2Report {
    SingularReport svd;
    int near_null = 0;
    long rows = 0, cols = 0;
    double row_identity_max_err = 0.0;  // TRT datum vs ray transform of R f R^T
    double potential_ratio = 0.0;       // |data| / |field| for the potential-type field
    bool pass = false;
};

// n = 2 kernel probe on the Euclidean disk.
Dim2Report dim2_kernel_probe(const MetricField& field, const Domain& domain,
                             const GridSpec& grid, const RayFamily& family, double h);

struct ConeFamily {
    Vec apex;
    Vec center_dir;
    double aperture = 0.0;
    std::vector<Vec> dirs;  // member 0 is the central direction
};

// Deterministic cap sampling: central member plus rings at the full
// aperture; every member angle is <= aperture.
ConeFamily cone_family(const MetricField& field, const Vec& apex, const Vec& center_dir,
                       double aperture, int count);

struct DeformationPath {
    Vec x0, theta0, x1, theta1;
    int steps = 12;
    // linear interpolation in (boundary chart, direction chart): great-circle
    // interpolation of the boundary point and of the direction
    std::pair<Vec, Vec> at(const MetricField& field, const Domain& domain, double t) const;
};

struct SupportScenario1 {
    double max_abs_data = 0.0;
    int rays = 0;
    bool pass = false;
};

struct SupportScenario2 {
    SingularReport svd;
    double ratio = 0.0;
    double recon_norm = 0.0;
    long mask_voxels = 0;
    long rows = 0, cols = 0;
    bool pass = false;
};

struct SupportScenario3 {
    double t1 = 0.0;
    double step = 0.0;
    int contact_step = -1;
};

// Scenario 1: forward data of a field supported away from every family
// member vanishes at quadrature tolerance.
SupportScenario1 support_scenario1(const MetricField& field, const Domain& domain,
                                   const SymTensorField2& f_true, const RayFamily& family,
                                   double h, double tol);

// Scenario 2: restrict unknowns to the M_A mask of the family and invert the
// family's (zero) data; reports the restricted operator's spectrum.
SupportScenario2 support_scenario2(const MetricField& field, const Domain& domain,
                                   const GridSpec& grid, const RayFamily& family,
                                   const std::optional<SpanningSet>& spanning, double h,
                                   double lambda, int iters, double ratio_threshold,
                                   double recon_tol);

// Scenario 3: sweep cones along a deformation path, report the first-contact
// parameter against the support mask of f_true.
SupportScenario3 support_scenario3(const MetricField& field, const Domain& domain,
                                   const GridSpec& grid, const SymTensorField2& f_true,
                                   const DeformationPath& def, double aperture,
                                   int members_per_cone, double h);

}  // namespace trt
