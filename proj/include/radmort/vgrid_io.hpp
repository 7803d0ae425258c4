#pragma once

#include <filesystem>

#include "radmort/grid.hpp"

namespace radmort {

// Interchange format: a UTF-8 JSON header `<stem>.vgrid`
//   {"dims":[nx,ny,nz], "spacing_mm":[sx,sy,sz], "dtype":"i16"|"f32"|"u8",
//    "unit":"HU"|"normalized"|"arbitrary"}
// plus a sibling `<stem>.raw` payload, little-endian, x-fastest
// (index = x + nx*y + nx*ny*z). CT volumes use i16 (HU) or f32
// (resampled / normalized); masks use u8.

enum class VgridDtype { I16, F32, U8 };

VolumeGrid load_volume(const std::filesystem::path& header_path);
MaskGrid load_mask(const std::filesystem::path& header_path);

void save_volume(const std::filesystem::path& header_path, const VolumeGrid& v, VgridDtype dtype);
void save_mask(const std::filesystem::path& header_path, const MaskGrid& m);

}  // namespace radmort
