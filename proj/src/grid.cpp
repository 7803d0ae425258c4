#include "radmort/grid.hpp"

#include <cmath>

namespace radmort {

std::string to_string(IntensityUnit u) {
    switch (u) {
        case IntensityUnit::HU: return "HU";
        case IntensityUnit::Normalized: return "normalized";
        case IntensityUnit::Arbitrary: return "arbitrary";
    }
    return "arbitrary";
}

IntensityUnit intensity_unit_from_string(const std::string& s) {
    if (s == "HU") return IntensityUnit::HU;
    if (s == "normalized") return IntensityUnit::Normalized;
    if (s == "arbitrary") return IntensityUnit::Arbitrary;
    throw ValidationError("unknown intensity unit '" + s + "'");
}

namespace {

template <typename Scalar>
void validate_geometry(const Grid<Scalar>& g, const std::string& context) {
    for (int i = 0; i < 3; ++i) {
        if (g.dims[i] <= 0)
            throw ValidationError(context + ": non-positive dimension on axis " + std::to_string(i));
        if (!(g.spacing_mm[i] > 0.0) || !std::isfinite(g.spacing_mm[i]))
            throw ValidationError(context + ": spacing must be positive and finite on axis " + std::to_string(i));
    }
    if (g.voxels.size() != g.size())
        throw ValidationError(context + ": voxel payload has " + std::to_string(g.voxels.size()) +
                              " values but dims imply " + std::to_string(g.size()));
}

}  // namespace

void validate(const VolumeGrid& v, const std::string& context) {
    validate_geometry(v, context);
    if (!v.voxels.isFinite().all())
        throw ValidationError(context + ": volume contains non-finite voxels");
    if (v.unit == IntensityUnit::Normalized) {
        if ((v.voxels < 0.0f).any() || (v.voxels > 1.0f).any())
            throw ValidationError(context + ": normalized volume has voxels outside [0, 1]");
    }
}

void validate(const MaskGrid& m, const std::string& context) {
    validate_geometry(m, context);
    if ((m.voxels > std::uint8_t{1}).any())
        throw ValidationError(context + ": mask labels must be 0 or 1");
}

std::int64_t mask_voxel_count(const MaskGrid& m) {
    return static_cast<std::int64_t>(m.voxels.template cast<std::int64_t>().sum());
}

}  // namespace radmort
