#include "doctest.h"

#include <cmath>

#include "radmort/features.hpp"
#include "radmort/rng.hpp"
#include "radmort/segment.hpp"
#include "radmort/synth.hpp"
#include "radmort/vgrid_io.hpp"
#include "test_helpers.hpp"

using namespace radmort;

namespace {

PhantomSpec small_spec(std::uint64_t seed = 3) {
    PhantomSpec spec;
    spec.n_patients = 10;
    spec.min_scans_per_patient = 1;
    spec.max_scans_per_patient = 3;
    spec.texture_contrast = 200.0;
    spec.noise_sd = 30.0;
    spec.seed = seed;
    return spec;
}

double glcm_contrast_of(const VolumeGrid& v, const MaskGrid& m) {
    const auto d = discretize(v, m, 25.0);
    const auto f = glcm_features(d);
    const auto& names = glcm_feature_names();
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == "glcm_contrast") return f[i];
    return 0.0;
}

// Two-sided Mann-Whitney rank-sum p-value via the normal approximation.
double rank_sum_p_value(const std::vector<double>& a, const std::vector<double>& b) {
    double u = 0.0;
    for (double x : a)
        for (double y : b) u += x > y ? 1.0 : (x == y ? 0.5 : 0.0);
    const double n1 = static_cast<double>(a.size()), n2 = static_cast<double>(b.size());
    const double mean = n1 * n2 / 2.0;
    const double sd = std::sqrt(n1 * n2 * (n1 + n2 + 1.0) / 12.0);
    const double z = std::abs(u - mean) / sd;
    return std::erfc(z / std::sqrt(2.0));
}

}  // namespace

TEST_CASE("cohort generation is reproducible") {
    testutil::TempDir a("synth_a"), b("synth_b");
    const PhantomSpec spec = small_spec();
    const GeneratedCohort ca = generate_cohort(spec, a.path, 2);
    const GeneratedCohort cb = generate_cohort(spec, b.path, 1);
    REQUIRE(ca.scans.size() == cb.scans.size());
    for (std::size_t i = 0; i < ca.scans.size(); ++i) {
        CHECK(ca.scans[i].scan_id == cb.scans[i].scan_id);
        CHECK(ca.scans[i].scan_date == cb.scans[i].scan_date);
    }
    // Volumes are bit-identical regardless of worker count.
    for (const auto& scan : ca.scans) {
        const VolumeGrid va = load_volume(a.path / scan.volume_path);
        const VolumeGrid vb = load_volume(b.path / scan.volume_path);
        CHECK((va.voxels == vb.voxels).all());
    }
}

TEST_CASE("different seeds give different cohorts") {
    testutil::TempDir a("synth_s1"), b("synth_s2");
    const GeneratedCohort ca = generate_cohort(small_spec(3), a.path, 2);
    const GeneratedCohort cb = generate_cohort(small_spec(4), b.path, 2);
    bool differs = ca.scans.size() != cb.scans.size();
    if (!differs)
        for (std::size_t i = 0; i < ca.scans.size(); ++i)
            if (ca.scans[i].scan_date != cb.scans[i].scan_date) differs = true;
    CHECK(differs);
}

TEST_CASE("generated records satisfy cohort integrity and match expected labels") {
    testutil::TempDir tmp("synth_labels");
    PhantomSpec spec = small_spec(9);
    spec.n_patients = 30;
    const GeneratedCohort cohort = generate_cohort(spec, tmp.path, 2);

    const auto labeled = assign_labels(cohort.scans, cohort.patients);
    REQUIRE(labeled.size() == cohort.ground_truth.scans.size());
    for (std::size_t i = 0; i < labeled.size(); ++i) {
        const auto& expected = cohort.ground_truth.scans[i];
        CHECK(labeled[i].scan_id == expected.scan_id);
        CHECK(labeled[i].label_1y == expected.expected_1y);
        CHECK(labeled[i].label_3y == expected.expected_3y);
        CHECK(labeled[i].label_5y == expected.expected_5y);
    }

    // Realized high-risk fraction within 99% binomial bounds of 1/2:
    // |k - n/2| <= 2.576 * sqrt(n)/2.
    int high_risk = 0;
    for (const auto& p : cohort.ground_truth.patients) high_risk += p.high_risk;
    const double n = static_cast<double>(cohort.ground_truth.patients.size());
    CHECK(std::abs(high_risk - n / 2.0) <= 2.576 * std::sqrt(n) / 2.0);
}

TEST_CASE("ground truth json round trips") {
    testutil::TempDir tmp("synth_gt");
    const GeneratedCohort cohort = generate_cohort(small_spec(5), tmp.path, 2);
    const PhantomGroundTruth back = read_ground_truth_json(tmp.path / "ground_truth.json");
    REQUIRE(back.patients.size() == cohort.ground_truth.patients.size());
    REQUIRE(back.scans.size() == cohort.ground_truth.scans.size());
    for (std::size_t i = 0; i < back.scans.size(); ++i) {
        CHECK(back.scans[i].scan_id == cohort.ground_truth.scans[i].scan_id);
        CHECK(back.scans[i].texture_amplitude == cohort.ground_truth.scans[i].texture_amplitude);
        CHECK(back.scans[i].expected_5y == cohort.ground_truth.scans[i].expected_5y);
    }
}

TEST_CASE("fallback segmenter recovers the generated masks") {
    PhantomSpec spec = small_spec(11);
    spec.noise_sd = 0.0;
    spec.texture_contrast = 0.0;
    auto [volume, mask] = phantom_scan_volume(spec, 0, 0, false);
    const MaskGrid segmented = threshold_segment_lungs(volume);
    CHECK(testutil::dice(segmented, mask) >= 0.95);
}

TEST_CASE("lungs are strictly interior to the body") {
    auto [volume, mask] = phantom_scan_volume(small_spec(12), 1, 0, true);
    // Every border voxel is exterior air and never lung.
    const auto dims = volume.dims;
    for (int z = 0; z < dims[2]; ++z)
        for (int y = 0; y < dims[1]; ++y)
            for (int x = 0; x < dims[0]; ++x) {
                const bool border = x == 0 || y == 0 || z == 0 || x == dims[0] - 1 || y == dims[1] - 1 ||
                                    z == dims[2] - 1;
                if (border) {
                    CHECK(mask.at(x, y, z) == 0);
                    CHECK(volume.at(x, y, z) == -1000.0f);
                }
            }
    CHECK(mask_voxel_count(mask) > 1000);
}

TEST_CASE("planted texture separates the arms; zero contrast does not") {
    PhantomSpec spec = small_spec(13);

    std::vector<double> low_arm, high_arm;
    for (int i = 0; i < 40; ++i) {
        auto [lv, lm] = phantom_scan_volume(spec, i, 0, false);
        low_arm.push_back(glcm_contrast_of(lv, lm));
        auto [hv, hm] = phantom_scan_volume(spec, 1000 + i, 0, true);
        high_arm.push_back(glcm_contrast_of(hv, hm));
    }
    double low_mean = 0, high_mean = 0;
    for (double x : low_arm) low_mean += x;
    for (double x : high_arm) high_mean += x;
    CHECK(high_mean / 40.0 > low_mean / 40.0);
    CHECK(rank_sum_p_value(high_arm, low_arm) < 0.01);

    // With texture_contrast 0 the "high-risk" volumes are statistically
    // indistinguishable from the low-risk ones.
    spec.texture_contrast = 0.0;
    std::vector<double> low0, high0;
    for (int i = 0; i < 40; ++i) {
        auto [lv, lm] = phantom_scan_volume(spec, i, 0, false);
        low0.push_back(glcm_contrast_of(lv, lm));
        auto [hv, hm] = phantom_scan_volume(spec, 1000 + i, 0, true);
        high0.push_back(glcm_contrast_of(hv, hm));
    }
    CHECK(rank_sum_p_value(high0, low0) > 0.01);
}

TEST_CASE("degenerate specs are rejected") {
    testutil::TempDir tmp("synth_bad");
    PhantomSpec spec = small_spec();
    spec.n_patients = 0;
    CHECK_THROWS_AS(generate_cohort(spec, tmp.path, 1), ValidationError);
    spec = small_spec();
    spec.min_scans_per_patient = 3;
    spec.max_scans_per_patient = 1;
    CHECK_THROWS_AS(generate_cohort(spec, tmp.path, 1), ValidationError);
}
