#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "radmort/grid.hpp"
#include "radmort/rng.hpp"

namespace testutil {

// Fresh scratch directory under the system temp dir, removed on destruction.
struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& tag) {
        path = std::filesystem::temp_directory_path() /
               ("radmort_test_" + tag + "_" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

inline radmort::VolumeGrid make_volume(std::array<int, 3> dims, std::array<double, 3> spacing,
                                       radmort::IntensityUnit unit = radmort::IntensityUnit::HU) {
    return radmort::VolumeGrid(dims, spacing, unit);
}

inline radmort::MaskGrid full_mask(std::array<int, 3> dims, std::array<double, 3> spacing) {
    radmort::MaskGrid m(dims, spacing);
    m.voxels.setConstant(1);
    return m;
}

// Solid ellipsoid rasterized at voxel centers.
inline void fill_ellipsoid(radmort::MaskGrid& m, std::array<double, 3> center_vox,
                           std::array<double, 3> semi_axes_vox) {
    for (int z = 0; z < m.dims[2]; ++z)
        for (int y = 0; y < m.dims[1]; ++y)
            for (int x = 0; x < m.dims[0]; ++x) {
                const double dx = (x - center_vox[0]) / semi_axes_vox[0];
                const double dy = (y - center_vox[1]) / semi_axes_vox[1];
                const double dz = (z - center_vox[2]) / semi_axes_vox[2];
                if (dx * dx + dy * dy + dz * dz <= 1.0) m.at(x, y, z) = 1;
            }
}

inline double dice(const radmort::MaskGrid& a, const radmort::MaskGrid& b) {
    double inter = 0, na = 0, nb = 0;
    for (Eigen::Index i = 0; i < a.voxels.size(); ++i) {
        inter += (a.voxels[i] && b.voxels[i]) ? 1.0 : 0.0;
        na += a.voxels[i];
        nb += b.voxels[i];
    }
    return 2.0 * inter / (na + nb);
}

}  // namespace testutil
