#include "radmort/segment.hpp"

#include <algorithm>
#include <cstdint>
#include <vector>

namespace radmort {

MaskGrid threshold_segment_lungs(const VolumeGrid& v, double air_hu) {
    if (v.unit != IntensityUnit::HU)
        throw ValidationError("threshold_segment_lungs: input must be in HU");
    validate(v, "threshold_segment_lungs input");

    const int nx = v.dims[0], ny = v.dims[1], nz = v.dims[2];
    const std::int64_t n = v.size();

    std::vector<std::int32_t> label(static_cast<std::size_t>(n), 0);  // 0 = not air, else component id
    std::vector<char> is_air(static_cast<std::size_t>(n), 0);
    for (std::int64_t i = 0; i < n; ++i) is_air[static_cast<std::size_t>(i)] = v.voxels[i] < air_hu;

    struct Component {
        std::int32_t id;
        std::int64_t size = 0;
        bool touches_border = false;
    };
    std::vector<Component> components;
    std::vector<std::int64_t> stack;

    std::int32_t next_id = 0;
    for (std::int64_t seed = 0; seed < n; ++seed) {
        if (!is_air[static_cast<std::size_t>(seed)] || label[static_cast<std::size_t>(seed)] != 0) continue;
        Component comp{++next_id};
        stack.clear();
        stack.push_back(seed);
        label[static_cast<std::size_t>(seed)] = comp.id;
        while (!stack.empty()) {
            const std::int64_t idx = stack.back();
            stack.pop_back();
            ++comp.size;
            const int z = static_cast<int>(idx / (static_cast<std::int64_t>(nx) * ny));
            const int rem = static_cast<int>(idx % (static_cast<std::int64_t>(nx) * ny));
            const int y = rem / nx;
            const int x = rem % nx;
            if (x == 0 || x == nx - 1 || y == 0 || y == ny - 1 || z == 0 || z == nz - 1)
                comp.touches_border = true;
            auto visit = [&](int xx, int yy, int zz) {
                if (xx < 0 || xx >= nx || yy < 0 || yy >= ny || zz < 0 || zz >= nz) return;
                const std::int64_t j = v.index(xx, yy, zz);
                if (is_air[static_cast<std::size_t>(j)] && label[static_cast<std::size_t>(j)] == 0) {
                    label[static_cast<std::size_t>(j)] = comp.id;
                    stack.push_back(j);
                }
            };
            visit(x - 1, y, z);
            visit(x + 1, y, z);
            visit(x, y - 1, z);
            visit(x, y + 1, z);
            visit(x, y, z - 1);
            visit(x, y, z + 1);
        }
        components.push_back(comp);
    }

    std::vector<Component> interior;
    for (const auto& c : components)
        if (!c.touches_border) interior.push_back(c);
    if (interior.empty())
        throw ValidationError("threshold_segment_lungs: no interior air component below " +
                              std::to_string(air_hu) + " HU (empty mask)");

    // Two largest interior components; ties broken by discovery order so the
    // result is deterministic.
    std::stable_sort(interior.begin(), interior.end(),
                     [](const Component& a, const Component& b) { return a.size > b.size; });
    if (interior.size() > 2) interior.resize(2);

    MaskGrid mask(v.dims, v.spacing_mm);
    for (const auto& c : interior)
        for (std::int64_t i = 0; i < n; ++i)
            if (label[static_cast<std::size_t>(i)] == c.id) mask.voxels[i] = 1;
    return mask;
}

}  // namespace radmort
