#include "trt/tensor_fields.hpp"

#include "trt/frames.hpp"

#include <cmath>
#include <stdexcept>

namespace trt {

GridSpec::GridSpec(int n_, int res_, double extent_) : n(n_), res(res_), extent(extent_) {
    if (n < 2) throw std::invalid_argument("GridSpec: dimension must be >= 2");
    if (res < 1) throw std::invalid_argument("GridSpec: resolution must be >= 1");
    if (!(extent > 0.0)) throw std::invalid_argument("GridSpec: extent must be positive");
    if (voxel_count() > 2'000'000)
        throw std::invalid_argument("GridSpec: grid exceeds the desk-scale voxel budget");
}

long GridSpec::voxel_count() const {
    long c = 1;
    for (int i = 0; i < n; ++i) c *= res;
    return c;
}

long GridSpec::flat_index(const std::vector<int>& idx) const {
    long f = 0;
    for (int i = 0; i < n; ++i) {
        if (idx[i] < 0 || idx[i] >= res) return -1;
        f = f * res + idx[i];
    }
    return f;
}

std::vector<int> GridSpec::multi_index(long flat) const {
    std::vector<int> idx(n);
    for (int i = n - 1; i >= 0; --i) {
        idx[i] = static_cast<int>(flat % res);
        flat /= res;
    }
    return idx;
}

Vec GridSpec::center(long flat) const {
    const auto idx = multi_index(flat);
    Vec c(n);
    const double h = cell();
    for (int i = 0; i < n; ++i) c[i] = -extent + (idx[i] + 0.5) * h;
    return c;
}

long GridSpec::locate(const Vec& x) const {
    std::vector<int> idx(n);
    const double h = cell();
    for (int i = 0; i < n; ++i) {
        const double u = (x[i] + extent) / h;
        if (u < 0.0 || u >= res) return -1;
        idx[i] = static_cast<int>(u);
    }
    return flat_index(idx);
}

std::vector<uint8_t> support_mask(const GridSpec& grid, const Domain& domain) {
    std::vector<uint8_t> mask(grid.voxel_count(), 0);
    for (long v = 0; v < grid.voxel_count(); ++v)
        mask[v] = domain.b(grid.center(v)) <= 0.0 ? 1 : 0;
    return mask;
}

void interp_stencil(const GridSpec& grid, const Vec& x, std::vector<InterpEntry>& out) {
    out.clear();
    const int n = grid.n;
    const double h = grid.cell();
    std::vector<int> base(n);
    std::vector<double> frac(n);
    for (int i = 0; i < n; ++i) {
        // coordinate in units of cells, measured from the first center
        const double u = (x[i] + grid.extent) / h - 0.5;
        const double fl = std::floor(u);
        base[i] = static_cast<int>(fl);
        frac[i] = u - fl;
    }
    const int corners = 1 << n;
    std::vector<int> idx(n);
    for (int c = 0; c < corners; ++c) {
        double w = 1.0;
        bool ok = true;
        for (int i = 0; i < n; ++i) {
            const int bit = (c >> i) & 1;
            w *= bit ? frac[i] : (1.0 - frac[i]);
            idx[i] = base[i] + bit;
            if (idx[i] < 0 || idx[i] >= grid.res) ok = false;
        }
        if (!ok || w == 0.0) continue;  // implicit zero ghost outside the box
        out.push_back({grid.flat_index(idx), w});
    }
}

SymTensorField2 SymTensorField2::closed_form(const Domain& domain, EvalFn fn) {
    if (!fn) throw std::invalid_argument("SymTensorField2: evaluator required");
    SymTensorField2 f;
    f.n_ = domain.n;
    f.voxel_ = false;
    f.domain_ = domain;
    f.fn_ = std::move(fn);
    return f;
}

SymTensorField2 SymTensorField2::voxel(const GridSpec& grid, const Domain& domain,
                                       std::vector<double> components) {
    const int nc = sym_component_count(grid.n);
    if (static_cast<long>(components.size()) != grid.voxel_count() * nc)
        throw std::invalid_argument("SymTensorField2: component buffer size mismatch");
    SymTensorField2 f;
    f.n_ = grid.n;
    f.voxel_ = true;
    f.domain_ = domain;
    f.grid_ = grid;
    f.mask_ = support_mask(grid, domain);
    f.comps_ = std::move(components);
    for (long v = 0; v < grid.voxel_count(); ++v)
        if (!f.mask_[v])
            for (int c = 0; c < nc; ++c) f.comps_[v * nc + c] = 0.0;
    return f;
}

Mat SymTensorField2::value(const Vec& x) const {
    if (!voxel_) {
        if (domain_.b(x) > 0.0) return Mat::Zero(n_, n_);
        Mat m = fn_(x);
        return 0.5 * (m + m.transpose());
    }
    const int nc = sym_component_count(n_);
    static thread_local std::vector<InterpEntry> stencil;
    interp_stencil(grid_, x, stencil);
    Vec comp = Vec::Zero(nc);
    for (const auto& e : stencil)
        for (int c = 0; c < nc; ++c) comp[c] += e.weight * comps_[e.voxel * nc + c];
    return vec_to_sym(n_, comp);
}

}  // namespace trt
