#include "doctest.h"

#include <fstream>

#include "radmort/vgrid_io.hpp"
#include "test_helpers.hpp"

using namespace radmort;

TEST_CASE("vgrid round trip is bit exact") {
    testutil::TempDir tmp("vgrid");

    VolumeGrid v({2, 2, 1}, {1.0, 1.0, 1.0}, IntensityUnit::HU);
    v.voxels << -1000.0f, 40.0f, -800.0f, 600.0f;

    SUBCASE("i16") {
        save_volume(tmp.path / "v.vgrid", v, VgridDtype::I16);
        const VolumeGrid r = load_volume(tmp.path / "v.vgrid");
        CHECK(r.dims == v.dims);
        CHECK(r.spacing_mm == v.spacing_mm);
        CHECK(r.unit == IntensityUnit::HU);
        CHECK((r.voxels == v.voxels).all());
    }
    SUBCASE("f32 with fractional values") {
        v.voxels << -1000.25f, 40.5f, -800.125f, 599.875f;
        save_volume(tmp.path / "v.vgrid", v, VgridDtype::F32);
        const VolumeGrid r = load_volume(tmp.path / "v.vgrid");
        CHECK((r.voxels == v.voxels).all());
    }
}

TEST_CASE("mask round trip stays binary") {
    testutil::TempDir tmp("vgrid_mask");
    MaskGrid m({3, 1, 2}, {1.0, 1.0, 2.0});
    m.voxels << 1, 0, 1, 0, 0, 1;
    save_mask(tmp.path / "m.vgrid", m);
    const MaskGrid r = load_mask(tmp.path / "m.vgrid");
    CHECK((r.voxels == m.voxels).all());
    CHECK(r.spacing_mm[2] == 2.0);
}

TEST_CASE("payload size mismatch is rejected") {
    testutil::TempDir tmp("vgrid_bad");
    VolumeGrid v({2, 2, 2}, {1, 1, 1}, IntensityUnit::HU);
    v.voxels.setConstant(1.0f);
    save_volume(tmp.path / "v.vgrid", v, VgridDtype::I16);
    // Truncate payload: header declares 8 voxels, file now holds 7.
    std::filesystem::resize_file(tmp.path / "v.raw", 14);
    CHECK_THROWS_AS(load_volume(tmp.path / "v.vgrid"), ValidationError);
}

TEST_CASE("malformed header is rejected with diagnostic") {
    testutil::TempDir tmp("vgrid_hdr");
    std::ofstream(tmp.path / "v.vgrid") << "{ not json";
    CHECK_THROWS_AS(load_volume(tmp.path / "v.vgrid"), ValidationError);

    std::ofstream(tmp.path / "w.vgrid") << R"({"dims":[2,2],"spacing_mm":[1,1,1],"dtype":"i16","unit":"HU"})";
    CHECK_THROWS_AS(load_volume(tmp.path / "w.vgrid"), ValidationError);
}

TEST_CASE("non-finite voxels are rejected") {
    testutil::TempDir tmp("vgrid_nan");
    VolumeGrid v({2, 1, 1}, {1, 1, 1}, IntensityUnit::HU);
    v.voxels << 1.0f, 2.0f;
    save_volume(tmp.path / "v.vgrid", v, VgridDtype::F32);
    // Poison the payload with a NaN.
    std::fstream raw(tmp.path / "v.raw", std::ios::binary | std::ios::in | std::ios::out);
    const float nan_value = std::nanf("");
    raw.write(reinterpret_cast<const char*>(&nan_value), 4);
    raw.close();
    CHECK_THROWS_AS(load_volume(tmp.path / "v.vgrid"), ValidationError);
}

TEST_CASE("missing file raises a runtime failure") {
    CHECK_THROWS_AS(load_volume("/nonexistent/path/v.vgrid"), RuntimeFailure);
}
