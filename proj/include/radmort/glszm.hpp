#pragma once

#include <Eigen/Core>

#include "radmort/discretize.hpp"

namespace radmort {

// Size-zone counts: entry (i, s-1) is the number of 26-connected zones of
// gray level i+1 and size s. Invariants: counts.sum() equals the number of
// zones, and sum over entries of s * count equals the in-mask voxel count.
struct GlszmMatrix {
    int num_levels = 0;
    Eigen::MatrixXd counts;  // Ng x Smax

    double zone_count() const { return counts.sum(); }
};

GlszmMatrix build_glszm(const DiscretizedVolume& d);

}  // namespace radmort
