#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <cstdint>
#include <string>

#include "radmort/errors.hpp"

namespace radmort {

enum class IntensityUnit { HU, Normalized, Arbitrary };

std::string to_string(IntensityUnit u);
IntensityUnit intensity_unit_from_string(const std::string& s);

// A dense 3D voxel grid with physical spacing. Voxels are stored x-fastest:
// index = x + nx*(y + ny*z). All image math in the project operates on this
// type or on views of its flat array.
template <typename Scalar>
struct Grid {
    using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

    std::array<int, 3> dims{0, 0, 0};
    std::array<double, 3> spacing_mm{1.0, 1.0, 1.0};
    Array voxels;
    IntensityUnit unit = IntensityUnit::Arbitrary;

    Grid() = default;
    Grid(std::array<int, 3> d, std::array<double, 3> s, IntensityUnit u = IntensityUnit::Arbitrary)
        : dims(d), spacing_mm(s), unit(u) {
        voxels = Array::Zero(size());
    }

    std::int64_t size() const {
        return static_cast<std::int64_t>(dims[0]) * dims[1] * dims[2];
    }
    std::int64_t index(int x, int y, int z) const {
        return x + static_cast<std::int64_t>(dims[0]) * (y + static_cast<std::int64_t>(dims[1]) * z);
    }
    Scalar& at(int x, int y, int z) { return voxels[index(x, y, z)]; }
    Scalar at(int x, int y, int z) const { return voxels[index(x, y, z)]; }

    double voxel_volume_mm3() const { return spacing_mm[0] * spacing_mm[1] * spacing_mm[2]; }

    bool same_geometry(const Grid<Scalar>& o) const { return dims == o.dims && spacing_mm == o.spacing_mm; }
    template <typename S2>
    bool same_geometry(const Grid<S2>& o) const { return dims == o.dims && spacing_mm == o.spacing_mm; }
};

using VolumeGrid = Grid<float>;
using MaskGrid = Grid<std::uint8_t>;

// Throws ValidationError when dims are non-positive, spacing is non-positive
// or non-finite, the voxel count disagrees with dims, a voxel is non-finite,
// or (for unit == Normalized) a voxel falls outside [0, 1].
void validate(const VolumeGrid& v, const std::string& context);

// Throws ValidationError when geometry is invalid or a label is not 0/1.
void validate(const MaskGrid& m, const std::string& context);

std::int64_t mask_voxel_count(const MaskGrid& m);

// Dims/spacing equality required for paired volume/mask operations.
template <typename A, typename B>
void require_same_geometry(const Grid<A>& a, const Grid<B>& b, const std::string& context) {
    if (a.dims != b.dims)
        throw ValidationError(context + ": dimension mismatch (" + std::to_string(a.dims[0]) + "x" +
                              std::to_string(a.dims[1]) + "x" + std::to_string(a.dims[2]) + " vs " +
                              std::to_string(b.dims[0]) + "x" + std::to_string(b.dims[1]) + "x" +
                              std::to_string(b.dims[2]) + ")");
    for (int a_i = 0; a_i < 3; ++a_i) {
        if (std::abs(a.spacing_mm[a_i] - b.spacing_mm[a_i]) > 1e-9)
            throw ValidationError(context + ": spacing mismatch on axis " + std::to_string(a_i));
    }
}

}  // namespace radmort
