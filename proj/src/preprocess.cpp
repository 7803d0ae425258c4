#include "radmort/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace radmort {

namespace {

std::array<int, 3> output_dims(const std::array<int, 3>& dims, const std::array<double, 3>& spacing,
                               double target_mm) {
    std::array<int, 3> out{};
    for (int i = 0; i < 3; ++i)
        out[i] = std::max(1, static_cast<int>(std::llround(dims[i] * spacing[i] / target_mm)));
    return out;
}

// Center-aligned source coordinate of output voxel i along one axis.
inline double source_coord(int i, double ratio) { return (i + 0.5) * ratio - 0.5; }

}  // namespace

VolumeGrid resample_isotropic(const VolumeGrid& v, double target_mm) {
    if (!(target_mm > 0.0) || !std::isfinite(target_mm))
        throw ValidationError("resample_isotropic: target_mm must be positive");
    validate(v, "resample_isotropic input");

    const auto odims = output_dims(v.dims, v.spacing_mm, target_mm);
    VolumeGrid out(odims, {target_mm, target_mm, target_mm}, v.unit);

    const double rx = target_mm / v.spacing_mm[0];
    const double ry = target_mm / v.spacing_mm[1];
    const double rz = target_mm / v.spacing_mm[2];
    const int nx = v.dims[0], ny = v.dims[1], nz = v.dims[2];

    // Per-axis interpolation stencils are precomputed once; the inner loop
    // is then a pure gather of eight voxels.
    struct Stencil { int i0, i1; double w1; };
    auto build = [](int n_out, int n_in, double ratio) {
        std::vector<Stencil> s(static_cast<std::size_t>(n_out));
        for (int i = 0; i < n_out; ++i) {
            double c = source_coord(i, ratio);
            c = std::clamp(c, 0.0, static_cast<double>(n_in - 1));
            const int i0 = std::min(n_in - 1, static_cast<int>(std::floor(c)));
            const int i1 = std::min(n_in - 1, i0 + 1);
            s[static_cast<std::size_t>(i)] = {i0, i1, c - i0};
        }
        return s;
    };
    const auto sx = build(odims[0], nx, rx);
    const auto sy = build(odims[1], ny, ry);
    const auto sz = build(odims[2], nz, rz);

    for (int z = 0; z < odims[2]; ++z) {
        const auto& cz = sz[static_cast<std::size_t>(z)];
        for (int y = 0; y < odims[1]; ++y) {
            const auto& cy = sy[static_cast<std::size_t>(y)];
            for (int x = 0; x < odims[0]; ++x) {
                const auto& cx = sx[static_cast<std::size_t>(x)];
                const double v000 = v.at(cx.i0, cy.i0, cz.i0);
                const double v100 = v.at(cx.i1, cy.i0, cz.i0);
                const double v010 = v.at(cx.i0, cy.i1, cz.i0);
                const double v110 = v.at(cx.i1, cy.i1, cz.i0);
                const double v001 = v.at(cx.i0, cy.i0, cz.i1);
                const double v101 = v.at(cx.i1, cy.i0, cz.i1);
                const double v011 = v.at(cx.i0, cy.i1, cz.i1);
                const double v111 = v.at(cx.i1, cy.i1, cz.i1);
                const double wx = cx.w1, wy = cy.w1, wz = cz.w1;
                const double c00 = v000 + (v100 - v000) * wx;
                const double c10 = v010 + (v110 - v010) * wx;
                const double c01 = v001 + (v101 - v001) * wx;
                const double c11 = v011 + (v111 - v011) * wx;
                const double c0 = c00 + (c10 - c00) * wy;
                const double c1 = c01 + (c11 - c01) * wy;
                out.at(x, y, z) = static_cast<float>(c0 + (c1 - c0) * wz);
            }
        }
    }
    return out;
}

MaskGrid resample_mask(const MaskGrid& m, double target_mm) {
    if (!(target_mm > 0.0) || !std::isfinite(target_mm))
        throw ValidationError("resample_mask: target_mm must be positive");
    validate(m, "resample_mask input");

    const auto odims = output_dims(m.dims, m.spacing_mm, target_mm);
    MaskGrid out(odims, {target_mm, target_mm, target_mm});

    auto nearest = [](int i, double ratio, int n_in) {
        const int j = static_cast<int>(std::llround(source_coord(i, ratio)));
        return std::clamp(j, 0, n_in - 1);
    };
    std::vector<int> ix(static_cast<std::size_t>(odims[0])), iy(static_cast<std::size_t>(odims[1])),
        iz(static_cast<std::size_t>(odims[2]));
    for (int i = 0; i < odims[0]; ++i) ix[static_cast<std::size_t>(i)] = nearest(i, target_mm / m.spacing_mm[0], m.dims[0]);
    for (int i = 0; i < odims[1]; ++i) iy[static_cast<std::size_t>(i)] = nearest(i, target_mm / m.spacing_mm[1], m.dims[1]);
    for (int i = 0; i < odims[2]; ++i) iz[static_cast<std::size_t>(i)] = nearest(i, target_mm / m.spacing_mm[2], m.dims[2]);

    for (int z = 0; z < odims[2]; ++z)
        for (int y = 0; y < odims[1]; ++y)
            for (int x = 0; x < odims[0]; ++x)
                out.at(x, y, z) = m.at(ix[static_cast<std::size_t>(x)], iy[static_cast<std::size_t>(y)],
                                       iz[static_cast<std::size_t>(z)]);
    return out;
}

VolumeGrid clip_normalize_hu(const VolumeGrid& v, double lo, double hi) {
    if (!(lo < hi)) throw ValidationError("clip_normalize_hu: requires lo < hi");
    if (v.unit != IntensityUnit::HU)
        throw ValidationError("clip_normalize_hu: input must be in HU");
    validate(v, "clip_normalize_hu input");

    VolumeGrid out = v;
    const double span = hi - lo;
    out.voxels = ((v.voxels.cast<double>().cwiseMax(lo).cwiseMin(hi) - lo) / span).cast<float>();
    // Guard against float rounding pushing an endpoint past 1.
    out.voxels = out.voxels.cwiseMax(0.0f).cwiseMin(1.0f);
    out.unit = IntensityUnit::Normalized;
    return out;
}

VolumeGrid apply_mask(const VolumeGrid& v, const MaskGrid& m) {
    validate(v, "apply_mask volume");
    validate(m, "apply_mask mask");
    require_same_geometry(v, m, "apply_mask");
    VolumeGrid out = v;
    out.voxels = v.voxels * m.voxels.cast<float>();
    return out;
}

}  // namespace radmort
