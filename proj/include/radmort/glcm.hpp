#pragma once

#include <Eigen/Core>

#include <array>
#include <vector>

#include "radmort/discretize.hpp"

namespace radmort {

// The 13 unique 3D offsets at Chebyshev distance 1 (one per opposite pair).
const std::array<std::array<int, 3>, 13>& glcm_directions();

// Per-direction symmetric co-occurrence counts at distance 1. Each ordered
// in-mask neighbor pair contributes to both (i,j) and (j,i), so every
// matrix is symmetric by construction; pair_count(d) = counts[d].sum().
struct GlcmMatrix {
    int num_levels = 0;
    std::vector<Eigen::MatrixXd> counts;  // 13 matrices, Ng x Ng

    double pair_count(std::size_t direction) const { return counts[direction].sum(); }
    // Probability matrix for one direction; zero matrix if no pairs exist.
    Eigen::MatrixXd normalized(std::size_t direction) const;
};

GlcmMatrix build_glcm(const DiscretizedVolume& d);

// The 24 co-occurrence features of glcm_feature_names(), each computed per
// direction and averaged over the directions that have at least one pair.
// Throws ValidationError when no direction has any pair (single voxel).
// Declared in features.hpp as well; defined once.

}  // namespace radmort
