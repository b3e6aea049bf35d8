#pragma once
// Symmetric rank-2 tensor fields: closed-form evaluators clamped to the
// inner ball, and cell-centered voxel grids with multilinear interpolation.
// Both extend by zero into the rest of the extended ball.

#include "trt/geometry.hpp"

#include <cstdint>
#include <functional>

namespace trt {

// Cell-centered cubic grid over the box [-extent, extent]^n.
struct GridSpec {
    int n = 3;
    int res = 8;          // voxels per axis
    double extent = 1.0;  // half-width of the box

    GridSpec() = default;
    GridSpec(int n_, int res_, double extent_);

    double cell() const { return 2.0 * extent / res; }
    long voxel_count() const;
    long flat_index(const std::vector<int>& idx) const;
    std::vector<int> multi_index(long flat) const;
    Vec center(long flat) const;
    // index of the voxel containing x, or -1 when outside the box
    long locate(const Vec& x) const;
    double half_diagonal() const { return 0.5 * cell() * std::sqrt(static_cast<double>(n)); }
};

// Support mask: voxels whose center lies in the closed inner ball.
std::vector<uint8_t> support_mask(const GridSpec& grid, const Domain& domain);

// Multilinear interpolation stencil at x: up to 2^n (voxel, weight) pairs
// over neighboring cell centers. Missing neighbors (outside the box) carry
// an implicit zero value, so the interpolant decays to zero at the rim.
struct InterpEntry {
    long voxel;
    double weight;
};
void interp_stencil(const GridSpec& grid, const Vec& x, std::vector<InterpEntry>& out);

class SymTensorField2 {
public:
    using EvalFn = std::function<Mat(const Vec&)>;

    // closed-form field; values are taken as 0 outside the inner ball
    static SymTensorField2 closed_form(const Domain& domain, EvalFn fn);
    // voxel field: `components` holds sym_component_count(n) values per voxel
    // (upper-triangular order), row-major over voxels. Values at voxels
    // outside the support mask are forced to zero.
    static SymTensorField2 voxel(const GridSpec& grid, const Domain& domain,
                                 std::vector<double> components);

    bool is_voxel() const { return voxel_; }
    const GridSpec& grid() const { return grid_; }
    const std::vector<double>& components() const { return comps_; }
    const std::vector<uint8_t>& support() const { return mask_; }
    int dim() const { return n_; }

    // symmetric matrix value at x (zero outside M / outside the box)
    Mat value(const Vec& x) const;

private:
    SymTensorField2() = default;
    int n_ = 0;
    bool voxel_ = false;
    Domain domain_;
    EvalFn fn_;
    GridSpec grid_;
    std::vector<double> comps_;
    std::vector<uint8_t> mask_;
};

}  // namespace trt
