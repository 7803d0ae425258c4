#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <unordered_set>
#include <vector>

#include "radmort/features.hpp"

namespace radmort {

namespace {

using Vec3 = Eigen::Vector3d;

// Volume enclosed by the 0.5-isosurface of the binary mask, built by
// marching tetrahedra on the Kuhn 6-tet decomposition of each cell between
// voxel centers. Binary corner values put every crossing at an edge
// midpoint, and the decomposition is translation-invariant, so the mesh is
// watertight; the divergence sum over outward-oriented triangles gives the
// enclosed volume. The raw triangle area of this mesh is NOT a good surface
// estimate (diagonal zigzagging inflates it), so area is computed separately
// by normal-weighted face counting below.
struct MeshStats {
    double area = 0.0;
    double volume = 0.0;
};

MeshStats mesh_surface(const MaskGrid& m) {
    const int nx = m.dims[0], ny = m.dims[1], nz = m.dims[2];
    const double sx = m.spacing_mm[0], sy = m.spacing_mm[1], sz = m.spacing_mm[2];

    auto inside = [&](int x, int y, int z) -> bool {
        if (x < 0 || x >= nx || y < 0 || y >= ny || z < 0 || z >= nz) return false;
        return m.at(x, y, z) != 0;
    };

    // Kuhn tetrahedra around the 000-111 diagonal; corner bits are (x,y,z).
    static constexpr int kTets[6][4] = {
        {0, 1, 3, 7}, {0, 1, 5, 7}, {0, 2, 3, 7}, {0, 2, 6, 7}, {0, 4, 5, 7}, {0, 4, 6, 7},
    };

    MeshStats stats;
    std::array<Vec3, 8> corner_pos;
    std::array<bool, 8> corner_in;

    auto emit = [&](Vec3 q0, Vec3 q1, Vec3 q2, const Vec3& in_ref, const Vec3& out_ref) {
        Vec3 normal = (q1 - q0).cross(q2 - q0);
        if (normal.dot(out_ref - in_ref) < 0.0) {
            std::swap(q1, q2);
            normal = -normal;
        }
        stats.area += 0.5 * normal.norm();
        stats.volume += q0.dot(q1.cross(q2)) / 6.0;
    };

    for (int z = -1; z < nz; ++z)
        for (int y = -1; y < ny; ++y)
            for (int x = -1; x < nx; ++x) {
                int occupancy = 0;
                for (int c = 0; c < 8; ++c) {
                    const int cx = x + (c & 1), cy = y + ((c >> 1) & 1), cz = z + ((c >> 2) & 1);
                    corner_in[static_cast<std::size_t>(c)] = inside(cx, cy, cz);
                    occupancy += corner_in[static_cast<std::size_t>(c)];
                    corner_pos[static_cast<std::size_t>(c)] = Vec3(cx * sx, cy * sy, cz * sz);
                }
                if (occupancy == 0 || occupancy == 8) continue;

                for (const auto& tet : kTets) {
                    std::array<int, 4> in_v{}, out_v{};
                    int n_in = 0, n_out = 0;
                    for (int k = 0; k < 4; ++k) {
                        if (corner_in[static_cast<std::size_t>(tet[k])])
                            in_v[static_cast<std::size_t>(n_in++)] = tet[k];
                        else
                            out_v[static_cast<std::size_t>(n_out++)] = tet[k];
                    }
                    if (n_in == 0 || n_in == 4) continue;

                    Vec3 in_ref = Vec3::Zero(), out_ref = Vec3::Zero();
                    for (int k = 0; k < n_in; ++k) in_ref += corner_pos[static_cast<std::size_t>(in_v[static_cast<std::size_t>(k)])];
                    for (int k = 0; k < n_out; ++k) out_ref += corner_pos[static_cast<std::size_t>(out_v[static_cast<std::size_t>(k)])];
                    in_ref /= n_in;
                    out_ref /= n_out;

                    auto mid = [&](int a, int b) {
                        return Vec3(0.5 * (corner_pos[static_cast<std::size_t>(a)] + corner_pos[static_cast<std::size_t>(b)]));
                    };
                    if (n_in == 1) {
                        emit(mid(in_v[0], out_v[0]), mid(in_v[0], out_v[1]), mid(in_v[0], out_v[2]), in_ref, out_ref);
                    } else if (n_in == 3) {
                        emit(mid(out_v[0], in_v[0]), mid(out_v[0], in_v[1]), mid(out_v[0], in_v[2]), in_ref, out_ref);
                    } else {
                        // Two in, two out: the cut is a quad; split into two triangles.
                        const Vec3 a = mid(in_v[0], out_v[0]);
                        const Vec3 b = mid(in_v[0], out_v[1]);
                        const Vec3 c = mid(in_v[1], out_v[1]);
                        const Vec3 d = mid(in_v[1], out_v[0]);
                        emit(a, b, c, in_ref, out_ref);
                        emit(a, c, d, in_ref, out_ref);
                    }
                }
            }
    stats.volume = std::abs(stats.volume);
    return stats;
}

// Surface area by normal-weighted face counting: every boundary face
// between an in-mask and an out-of-mask voxel contributes its face area
// scaled by |n_a|, the component of the locally estimated unit normal along
// the face axis. Raw face counting measures the projected area integral
// sum_a |n_a| dA; the weighting turns that into sum_a n_a^2 dA = dA, which
// converges to the true area for smooth surfaces and is exact on axis-
// aligned planes.
double surface_area_estimate(const MaskGrid& m) {
    const int nx = m.dims[0], ny = m.dims[1], nz = m.dims[2];
    const double sx = m.spacing_mm[0], sy = m.spacing_mm[1], sz = m.spacing_mm[2];

    auto raw = [&](int x, int y, int z) -> double {
        if (x < 0 || x >= nx || y < 0 || y >= ny || z < 0 || z >= nz) return 0.0;
        return m.at(x, y, z) ? 1.0 : 0.0;
    };
    // Separable [1,2,1]/4 smoothing of the indicator, evaluated on demand.
    auto smooth = [&](int x, int y, int z) -> double {
        double acc = 0.0;
        static constexpr double w[3] = {0.25, 0.5, 0.25};
        for (int dz = -1; dz <= 1; ++dz)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx)
                    acc += w[dx + 1] * w[dy + 1] * w[dz + 1] * raw(x + dx, y + dy, z + dz);
        return acc;
    };
    auto gradient = [&](int x, int y, int z) -> Vec3 {
        return Vec3((smooth(x + 1, y, z) - smooth(x - 1, y, z)) / (2.0 * sx),
                    (smooth(x, y + 1, z) - smooth(x, y - 1, z)) / (2.0 * sy),
                    (smooth(x, y, z + 1) - smooth(x, y, z - 1)) / (2.0 * sz));
    };

    const double face_area[3] = {sy * sz, sx * sz, sx * sy};
    double area = 0.0;
    auto add_face = [&](int x, int y, int z, int axis, int ox, int oy, int oz) {
        const Vec3 g = 0.5 * (gradient(x, y, z) + gradient(ox, oy, oz));
        const double norm = g.norm();
        const double weight = norm > 1e-12 ? std::abs(g[axis]) / norm : 1.0;
        area += face_area[axis] * weight;
    };
    for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x) {
                if (!m.at(x, y, z)) continue;
                if (raw(x - 1, y, z) == 0.0) add_face(x, y, z, 0, x - 1, y, z);
                if (raw(x + 1, y, z) == 0.0) add_face(x, y, z, 0, x + 1, y, z);
                if (raw(x, y - 1, z) == 0.0) add_face(x, y, z, 1, x, y - 1, z);
                if (raw(x, y + 1, z) == 0.0) add_face(x, y, z, 1, x, y + 1, z);
                if (raw(x, y, z - 1) == 0.0) add_face(x, y, z, 2, x, y, z - 1);
                if (raw(x, y, z + 1) == 0.0) add_face(x, y, z, 2, x, y, z + 1);
            }
    return area;
}

// Boundary voxels: in-mask with at least one 6-neighbor outside.
std::vector<std::array<int, 3>> boundary_voxels(const MaskGrid& m) {
    const int nx = m.dims[0], ny = m.dims[1], nz = m.dims[2];
    auto inside = [&](int x, int y, int z) -> bool {
        if (x < 0 || x >= nx || y < 0 || y >= ny || z < 0 || z >= nz) return false;
        return m.at(x, y, z) != 0;
    };
    std::vector<std::array<int, 3>> out;
    for (int z = 0; z < nz; ++z)
        for (int y = 0; y < ny; ++y)
            for (int x = 0; x < nx; ++x) {
                if (!m.at(x, y, z)) continue;
                if (!inside(x - 1, y, z) || !inside(x + 1, y, z) || !inside(x, y - 1, z) ||
                    !inside(x, y + 1, z) || !inside(x, y, z - 1) || !inside(x, y, z + 1))
                    out.push_back({x, y, z});
            }
    return out;
}

double max_pairwise_distance(const std::vector<Vec3>& pts) {
    double best = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            best = std::max(best, (pts[i] - pts[j]).squaredNorm());
    return std::sqrt(best);
}

// Max pairwise distance of boundary voxels projected onto a coordinate
// plane; duplicate projections are removed first.
double max_projected_distance(const std::vector<std::array<int, 3>>& boundary, int axis_a, int axis_b,
                              double spacing_a, double spacing_b) {
    std::unordered_set<std::uint64_t> seen;
    std::vector<Vec3> pts;
    for (const auto& v : boundary) {
        const auto key = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(v[static_cast<std::size_t>(axis_a)])) << 32) |
                         static_cast<std::uint32_t>(v[static_cast<std::size_t>(axis_b)]);
        if (seen.insert(key).second)
            pts.emplace_back(v[static_cast<std::size_t>(axis_a)] * spacing_a,
                             v[static_cast<std::size_t>(axis_b)] * spacing_b, 0.0);
    }
    return max_pairwise_distance(pts);
}

}  // namespace

std::vector<double> shape_features(const MaskGrid& m) {
    validate(m, "shape_features mask");
    const std::int64_t count = mask_voxel_count(m);
    if (count == 0) throw ValidationError("shape_features: empty mask");

    const double voxel_volume = static_cast<double>(count) * m.voxel_volume_mm3();
    const MeshStats mesh = mesh_surface(m);
    const double area = surface_area_estimate(m);

    const double sphericity = std::cbrt(36.0 * M_PI * mesh.volume * mesh.volume) / area;
    const double surface_to_volume = area / mesh.volume;

    // Principal axes from the covariance of in-mask voxel centers.
    Vec3 mean = Vec3::Zero();
    const double sx = m.spacing_mm[0], sy = m.spacing_mm[1], sz = m.spacing_mm[2];
    for (int z = 0; z < m.dims[2]; ++z)
        for (int y = 0; y < m.dims[1]; ++y)
            for (int x = 0; x < m.dims[0]; ++x)
                if (m.at(x, y, z)) mean += Vec3(x * sx, y * sy, z * sz);
    mean /= static_cast<double>(count);
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (int z = 0; z < m.dims[2]; ++z)
        for (int y = 0; y < m.dims[1]; ++y)
            for (int x = 0; x < m.dims[0]; ++x)
                if (m.at(x, y, z)) {
                    const Vec3 c = Vec3(x * sx, y * sy, z * sz) - mean;
                    cov += c * c.transpose();
                }
    cov /= static_cast<double>(count);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    // Ascending from Eigen; relabel so l1 >= l2 >= l3, clamp noise negatives.
    const double l1 = std::max(0.0, eig.eigenvalues()[2]);
    const double l2 = std::max(0.0, eig.eigenvalues()[1]);
    const double l3 = std::max(0.0, eig.eigenvalues()[0]);
    const double major = 4.0 * std::sqrt(l1);
    const double minor = 4.0 * std::sqrt(l2);
    const double least = 4.0 * std::sqrt(l3);
    // Single-voxel (or otherwise degenerate) masks: ratios are 1 by convention.
    const double elongation = l1 > 0.0 ? std::sqrt(l2 / l1) : 1.0;
    const double flatness = l1 > 0.0 ? std::sqrt(l3 / l1) : 1.0;

    const auto boundary = boundary_voxels(m);
    std::vector<Vec3> pts;
    pts.reserve(boundary.size());
    for (const auto& v : boundary) pts.emplace_back(v[0] * sx, v[1] * sy, v[2] * sz);
    const double max_3d = max_pairwise_distance(pts);
    const double max_2d_axial = max_projected_distance(boundary, 0, 1, sx, sy);     // xy plane
    const double max_2d_coronal = max_projected_distance(boundary, 0, 2, sx, sz);   // xz plane
    const double max_2d_sagittal = max_projected_distance(boundary, 1, 2, sy, sz);  // yz plane

    // Alphabetical order; keep in sync with shape_feature_names().
    return {
        elongation,
        flatness,
        least,
        major,
        max_2d_axial,
        max_2d_coronal,
        max_2d_sagittal,
        max_3d,
        mesh.volume,
        minor,
        sphericity,
        area,
        surface_to_volume,
        voxel_volume,
    };
}

}  // namespace radmort
