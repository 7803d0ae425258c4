#include "radmort/discretize.hpp"

#include <cmath>
#include <limits>

namespace radmort {

DiscretizedVolume discretize(const VolumeGrid& v, const MaskGrid& m, double bin_width) {
    if (!(bin_width > 0.0) || !std::isfinite(bin_width))
        throw ValidationError("discretize: bin_width must be positive");
    validate(v, "discretize volume");
    validate(m, "discretize mask");
    require_same_geometry(v, m, "discretize");

    const std::int64_t n = v.size();
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    std::int64_t count = 0;
    for (std::int64_t i = 0; i < n; ++i) {
        if (!m.voxels[i]) continue;
        const double x = v.voxels[i];
        lo = std::min(lo, x);
        hi = std::max(hi, x);
        ++count;
    }
    if (count == 0) throw ValidationError("discretize: empty mask");

    DiscretizedVolume d;
    d.dims = v.dims;
    d.spacing_mm = v.spacing_mm;
    d.bin_width = bin_width;
    d.num_levels = std::max(1, static_cast<int>(std::floor((hi - lo) / bin_width)) + 1);
    d.levels = Eigen::ArrayXi::Zero(n);
    for (std::int64_t i = 0; i < n; ++i) {
        if (!m.voxels[i]) continue;
        int level = static_cast<int>(std::floor((v.voxels[i] - lo) / bin_width)) + 1;
        d.levels[i] = std::min(std::max(level, 1), d.num_levels);
    }
    return d;
}

}  // namespace radmort
