#include "doctest.h"

#include "radmort/preprocess.hpp"
#include "radmort/rng.hpp"
#include "test_helpers.hpp"

using namespace radmort;

namespace {

VolumeGrid random_volume(std::mt19937_64& eng, std::array<int, 3> dims, std::array<double, 3> spacing) {
    VolumeGrid v(dims, spacing, IntensityUnit::HU);
    for (Eigen::Index i = 0; i < v.voxels.size(); ++i)
        v.voxels[i] = static_cast<float>(uniform_real(eng, -1200.0, 600.0));
    return v;
}

}  // namespace

TEST_CASE("resample_isotropic identity at target spacing") {
    auto eng = make_engine(11);
    const VolumeGrid v = random_volume(eng, {7, 5, 4}, {1.0, 1.0, 1.0});
    const VolumeGrid r = resample_isotropic(v, 1.0);
    CHECK(r.dims == v.dims);
    CHECK((r.voxels == v.voxels).all());
}

TEST_CASE("resample_isotropic dims follow the physical-extent rule") {
    VolumeGrid v({4, 4, 4}, {2.0, 2.0, 2.0}, IntensityUnit::HU);
    v.voxels.setConstant(3.5f);
    const VolumeGrid r = resample_isotropic(v, 1.0);
    CHECK(r.dims == std::array<int, 3>{8, 8, 8});
    CHECK(r.spacing_mm == std::array<double, 3>{1.0, 1.0, 1.0});
    // Constant stays constant under trilinear interpolation.
    CHECK((r.voxels == 3.5f).all());
}

TEST_CASE("resample_isotropic stays within input bounds and is idempotent") {
    auto eng = make_engine(12);
    for (int trial = 0; trial < 20; ++trial) {
        const std::array<int, 3> dims{static_cast<int>(uniform_int(eng, 2, 9)),
                                      static_cast<int>(uniform_int(eng, 2, 9)),
                                      static_cast<int>(uniform_int(eng, 2, 9))};
        const std::array<double, 3> spacing{uniform_real(eng, 0.5, 3.0), uniform_real(eng, 0.5, 3.0),
                                            uniform_real(eng, 0.5, 3.0)};
        const VolumeGrid v = random_volume(eng, dims, spacing);
        const VolumeGrid r = resample_isotropic(v, 1.0);
        CHECK(r.voxels.minCoeff() >= v.voxels.minCoeff() - 1e-4f);
        CHECK(r.voxels.maxCoeff() <= v.voxels.maxCoeff() + 1e-4f);

        const VolumeGrid again = resample_isotropic(r, 1.0);
        CHECK(again.dims == r.dims);
        CHECK((again.voxels == r.voxels).all());
    }
}

TEST_CASE("resample_isotropic reproduces linear ramps away from the border") {
    // f(x,y,z) = 2x + 3y - z in physical mm; trilinear represents it exactly,
    // so interior voxels of a 2mm -> 1mm resample match direct 1mm sampling.
    auto field = [](double x_mm, double y_mm, double z_mm) { return 2.0 * x_mm + 3.0 * y_mm - z_mm; };
    VolumeGrid coarse({8, 8, 8}, {2.0, 2.0, 2.0}, IntensityUnit::HU);
    for (int z = 0; z < 8; ++z)
        for (int y = 0; y < 8; ++y)
            for (int x = 0; x < 8; ++x) coarse.at(x, y, z) = static_cast<float>(field(2.0 * x, 2.0 * y, 2.0 * z));
    const VolumeGrid fine = resample_isotropic(coarse, 1.0);
    REQUIRE(fine.dims == std::array<int, 3>{16, 16, 16});
    // Output voxel i sits at physical (i + 0.5) * 1 - 0.5 relative to the
    // coarse voxel-0 center, i.e. coarse coordinate (i - 0.5) / 2 in index
    // space; skip outputs whose source coordinate clamps at the border.
    for (int z = 1; z < 15; ++z)
        for (int y = 1; y < 15; ++y)
            for (int x = 1; x < 15; ++x) {
                const double expected = field(x - 0.5, y - 0.5, z - 0.5);
                CHECK(std::abs(fine.at(x, y, z) - expected) <= 1e-6 * std::max(1.0, std::abs(expected)));
            }
}

TEST_CASE("resample_mask nearest neighbor keeps masks binary") {
    MaskGrid m({1, 1, 1}, {2.0, 2.0, 2.0});
    m.voxels << 1;
    const MaskGrid r = resample_mask(m, 1.0);
    CHECK(r.dims == std::array<int, 3>{2, 2, 2});
    CHECK((r.voxels == 1).all());

    auto eng = make_engine(13);
    for (int trial = 0; trial < 20; ++trial) {
        MaskGrid rnd({static_cast<int>(uniform_int(eng, 1, 6)), static_cast<int>(uniform_int(eng, 1, 6)),
                      static_cast<int>(uniform_int(eng, 1, 6))},
                     {uniform_real(eng, 0.5, 3.0), uniform_real(eng, 0.5, 3.0), uniform_real(eng, 0.5, 3.0)});
        for (Eigen::Index i = 0; i < rnd.voxels.size(); ++i)
            rnd.voxels[i] = static_cast<std::uint8_t>(uniform_index(eng, 2));
        const MaskGrid rr = resample_mask(rnd, 1.0);
        CHECK(((rr.voxels == 0) || (rr.voxels == 1)).all());
    }
}

TEST_CASE("clip_normalize_hu maps the window onto [0,1]") {
    VolumeGrid v({5, 1, 1}, {1, 1, 1}, IntensityUnit::HU);
    v.voxels << -1200.0f, 600.0f, -300.0f, -2000.0f, 1500.0f;
    const VolumeGrid n = clip_normalize_hu(v);
    CHECK(n.unit == IntensityUnit::Normalized);
    CHECK(n.voxels[0] == doctest::Approx(0.0));
    CHECK(n.voxels[1] == doctest::Approx(1.0));
    CHECK(n.voxels[2] == doctest::Approx(0.5));
    CHECK(n.voxels[3] == doctest::Approx(0.0));  // clipped low
    CHECK(n.voxels[4] == doctest::Approx(1.0));  // clipped high

    CHECK_THROWS_AS(clip_normalize_hu(v, 100.0, 100.0), ValidationError);
}

TEST_CASE("clip_normalize_hu is monotone") {
    auto eng = make_engine(14);
    VolumeGrid v({64, 1, 1}, {1, 1, 1}, IntensityUnit::HU);
    for (Eigen::Index i = 0; i < v.voxels.size(); ++i)
        v.voxels[i] = static_cast<float>(uniform_real(eng, -3000.0, 3000.0));
    const VolumeGrid n = clip_normalize_hu(v);
    for (Eigen::Index i = 0; i < v.voxels.size(); ++i)
        for (Eigen::Index j = 0; j < v.voxels.size(); ++j)
            if (v.voxels[i] <= v.voxels[j]) CHECK(n.voxels[i] <= n.voxels[j]);
}

TEST_CASE("apply_mask zeroes background and is idempotent") {
    VolumeGrid v({2, 1, 1}, {1, 1, 1}, IntensityUnit::HU);
    v.voxels << 5.0f, 7.0f;
    MaskGrid m({2, 1, 1}, {1, 1, 1});
    m.voxels << 1, 0;
    const VolumeGrid out = apply_mask(v, m);
    CHECK(out.voxels[0] == 5.0f);
    CHECK(out.voxels[1] == 0.0f);
    const VolumeGrid out2 = apply_mask(out, m);
    CHECK((out2.voxels == out.voxels).all());

    MaskGrid ones({2, 1, 1}, {1, 1, 1});
    ones.voxels.setConstant(1);
    CHECK((apply_mask(v, ones).voxels == v.voxels).all());
    MaskGrid zeros({2, 1, 1}, {1, 1, 1});
    CHECK((apply_mask(v, zeros).voxels == 0.0f).all());

    MaskGrid wrong({3, 1, 1}, {1, 1, 1});
    CHECK_THROWS_AS(apply_mask(v, wrong), ValidationError);
}
