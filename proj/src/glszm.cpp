#include "radmort/glszm.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

#include "radmort/features.hpp"

namespace radmort {

GlszmMatrix build_glszm(const DiscretizedVolume& d) {
    const int nx = d.dims[0], ny = d.dims[1], nz = d.dims[2];
    const std::int64_t n = d.levels.size();

    std::vector<char> visited(static_cast<std::size_t>(n), 0);
    std::vector<std::int64_t> stack;
    std::vector<std::pair<int, std::int64_t>> zones;  // (level, size)
    std::int64_t largest = 1;

    for (std::int64_t seed = 0; seed < n; ++seed) {
        if (visited[static_cast<std::size_t>(seed)] || d.levels[seed] == 0) continue;
        const int level = d.levels[seed];
        std::int64_t size = 0;
        stack.clear();
        stack.push_back(seed);
        visited[static_cast<std::size_t>(seed)] = 1;
        while (!stack.empty()) {
            const std::int64_t idx = stack.back();
            stack.pop_back();
            ++size;
            const int z = static_cast<int>(idx / (static_cast<std::int64_t>(nx) * ny));
            const int rem = static_cast<int>(idx % (static_cast<std::int64_t>(nx) * ny));
            const int y = rem / nx;
            const int x = rem % nx;
            for (int dz = -1; dz <= 1; ++dz)
                for (int dy = -1; dy <= 1; ++dy)
                    for (int dx = -1; dx <= 1; ++dx) {
                        if (dx == 0 && dy == 0 && dz == 0) continue;
                        const int xx = x + dx, yy = y + dy, zz = z + dz;
                        if (xx < 0 || xx >= nx || yy < 0 || yy >= ny || zz < 0 || zz >= nz) continue;
                        const std::int64_t j = d.index(xx, yy, zz);
                        if (!visited[static_cast<std::size_t>(j)] && d.levels[j] == level) {
                            visited[static_cast<std::size_t>(j)] = 1;
                            stack.push_back(j);
                        }
                    }
        }
        zones.emplace_back(level, size);
        largest = std::max(largest, size);
    }
    if (zones.empty()) throw ValidationError("build_glszm: empty mask");

    GlszmMatrix g;
    g.num_levels = d.num_levels;
    g.counts = Eigen::MatrixXd::Zero(d.num_levels, largest);
    for (const auto& [level, size] : zones) g.counts(level - 1, size - 1) += 1.0;
    return g;
}

std::vector<double> glszm_features(const DiscretizedVolume& d) {
    const GlszmMatrix g = build_glszm(d);
    const int ng = static_cast<int>(g.counts.rows());
    const int smax = static_cast<int>(g.counts.cols());
    const double nz = g.zone_count();

    double np = 0.0;  // in-mask voxels, recovered from the mass identity
    for (int i = 0; i < ng; ++i)
        for (int s = 0; s < smax; ++s) np += g.counts(i, s) * (s + 1.0);

    double sae = 0, lae = 0, lglze = 0, hglze = 0;
    double salgle = 0, sahgle = 0, lalgle = 0, lahgle = 0;
    double mu_level = 0, mu_size = 0, zone_entropy = 0;
    Eigen::VectorXd by_level = g.counts.rowwise().sum();
    Eigen::VectorXd by_size = g.counts.colwise().sum();

    for (int i = 0; i < ng; ++i)
        for (int s = 0; s < smax; ++s) {
            const double c = g.counts(i, s);
            if (c == 0.0) continue;
            const double level = i + 1.0, size = s + 1.0;
            const double l2 = level * level, s2 = size * size;
            sae += c / s2;
            lae += c * s2;
            lglze += c / l2;
            hglze += c * l2;
            salgle += c / (l2 * s2);
            sahgle += c * l2 / s2;
            lalgle += c * s2 / l2;
            lahgle += c * l2 * s2;
            const double p = c / nz;
            mu_level += p * level;
            mu_size += p * size;
            zone_entropy -= p * std::log2(p);
        }
    double glv = 0, zv = 0;
    for (int i = 0; i < ng; ++i)
        for (int s = 0; s < smax; ++s) {
            const double p = g.counts(i, s) / nz;
            if (p == 0.0) continue;
            glv += p * (i + 1.0 - mu_level) * (i + 1.0 - mu_level);
            zv += p * (s + 1.0 - mu_size) * (s + 1.0 - mu_size);
        }
    const double gln = by_level.squaredNorm() / nz;
    const double szn = by_size.squaredNorm() / nz;

    // Alphabetical order; keep in sync with glszm_feature_names().
    return {
        gln,       // gray_level_non_uniformity
        gln / nz,  // gray_level_non_uniformity_normalized
        glv,
        hglze / nz,
        lae / nz,
        lahgle / nz,
        lalgle / nz,
        lglze / nz,
        szn,
        szn / nz,
        sae / nz,
        sahgle / nz,
        salgle / nz,
        std::max(zone_entropy, 0.0),
        nz / np,  // zone_percentage
        zv,
    };
}

}  // namespace radmort
