#pragma once

#include <Eigen/Core>

#include "radmort/grid.hpp"

namespace radmort {

// Gray levels over the masked region, the shared precursor of the texture
// matrices. Binning is anchored at the in-mask minimum with fixed width, so
// levels are invariant to a constant intensity shift:
//   level(x) = floor((v(x) - min_in_mask) / bin_width) + 1
// and Ng = floor((max_in_mask - min_in_mask) / bin_width) + 1 (>= 1).
// Out-of-mask voxels carry level 0.
struct DiscretizedVolume {
    std::array<int, 3> dims{0, 0, 0};
    std::array<double, 3> spacing_mm{1.0, 1.0, 1.0};
    Eigen::ArrayXi levels;  // full grid, x-fastest; 0 outside the mask
    int num_levels = 0;
    double bin_width = 0.0;

    std::int64_t index(int x, int y, int z) const {
        return x + static_cast<std::int64_t>(dims[0]) * (y + static_cast<std::int64_t>(dims[1]) * z);
    }
    int level_at(int x, int y, int z) const { return levels[index(x, y, z)]; }
    bool in_mask(int x, int y, int z) const { return level_at(x, y, z) > 0; }
};

DiscretizedVolume discretize(const VolumeGrid& v, const MaskGrid& m, double bin_width);

}  // namespace radmort
