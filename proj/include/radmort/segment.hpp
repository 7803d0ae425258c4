#pragma once

#include "radmort/grid.hpp"

namespace radmort {

// Fallback lung segmenter for HU volumes: threshold air-like voxels
// (value < air_hu), drop every air component that touches the volume
// border (exterior air), keep the two largest interior components.
// Components use 6-connectivity. Throws ValidationError when no interior
// component remains.
MaskGrid threshold_segment_lungs(const VolumeGrid& v, double air_hu = -320.0);

}  // namespace radmort
