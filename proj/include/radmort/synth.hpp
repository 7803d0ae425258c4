#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "radmort/cohort.hpp"
#include "radmort/grid.hpp"

namespace radmort {

enum class RiskModel { None, TextureLinked };

std::string to_string(RiskModel r);
RiskModel risk_model_from_string(const std::string& s);

// Phantom cohort specification. Identical specs generate bit-identical
// cohorts; per-patient seeds derive from (seed, patient index) so patients
// can be generated concurrently in any order.
struct PhantomSpec {
    int n_patients = 60;
    int min_scans_per_patient = 1;
    int max_scans_per_patient = 4;
    RiskModel risk_model = RiskModel::TextureLinked;
    double texture_contrast = 200.0;  // HU amplitude of the planted in-lung texture
    double noise_sd = 30.0;           // HU white noise inside the lungs, both arms
    std::uint64_t seed = 1;
};

// Latent variables the generator committed to, for verification.
struct PhantomGroundTruth {
    struct Patient {
        std::string patient_id;
        bool high_risk = false;
        bool deceased = false;
    };
    struct Scan {
        std::string scan_id;
        std::string patient_id;
        double texture_amplitude = 0.0;
        Label expected_1y = Label::Censored;
        Label expected_3y = Label::Censored;
        Label expected_5y = Label::Censored;
    };
    std::vector<Patient> patients;
    std::vector<Scan> scans;
};

struct GeneratedCohort {
    std::vector<ScanRecord> scans;
    std::vector<PatientRecord> patients;
    PhantomGroundTruth ground_truth;
};

// Writes volumes (i16 HU) and matching ground-truth masks (u8) under
// dir/volumes/, plus scans.csv, patients.csv and ground_truth.json in dir.
// Mask headers sit next to each volume with the `_mask` suffix. jobs caps
// concurrent patient generation; the output does not depend on it.
GeneratedCohort generate_cohort(const PhantomSpec& spec, const std::filesystem::path& dir, unsigned jobs = 1);

// The volume/mask pair for one scan, for tests that want grids in memory.
std::pair<VolumeGrid, MaskGrid> phantom_scan_volume(const PhantomSpec& spec, int patient_index,
                                                    int scan_index, bool high_risk);

void write_ground_truth_json(const std::filesystem::path& path, const PhantomGroundTruth& gt);
PhantomGroundTruth read_ground_truth_json(const std::filesystem::path& path);

}  // namespace radmort
