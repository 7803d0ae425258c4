#pragma once

#include "radmort/grid.hpp"

namespace radmort {

// Resample to isotropic voxels of edge target_mm using trilinear
// interpolation. Output dims are round(dim_i * spacing_i / target_mm) per
// axis (minimum 1). Voxel centers are aligned between grids; source
// coordinates outside the input grid are clamped to the border voxel.
// When the input is already isotropic at target_mm the output is
// voxel-identical to the input.
VolumeGrid resample_isotropic(const VolumeGrid& v, double target_mm = 1.0);

// Same grid geometry rule as resample_isotropic, nearest-neighbor lookup so
// the output stays strictly binary.
MaskGrid resample_mask(const MaskGrid& m, double target_mm);

// Clip to [lo, hi] then map linearly onto [0, 1]; the result is tagged
// Normalized. Requires lo < hi and an HU input.
VolumeGrid clip_normalize_hu(const VolumeGrid& v, double lo = -1200.0, double hi = 600.0);

// Voxel-wise product with a shape-matched binary mask; background becomes 0.
VolumeGrid apply_mask(const VolumeGrid& v, const MaskGrid& m);

}  // namespace radmort
