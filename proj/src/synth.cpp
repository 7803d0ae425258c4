#include "radmort/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "json.hpp"

#include "radmort/errors.hpp"
#include "radmort/parallel.hpp"
#include "radmort/rng.hpp"
#include "radmort/vgrid_io.hpp"

namespace radmort {

std::string to_string(RiskModel r) { return r == RiskModel::None ? "none" : "texture-linked"; }

RiskModel risk_model_from_string(const std::string& s) {
    if (s == "none") return RiskModel::None;
    if (s == "texture-linked") return RiskModel::TextureLinked;
    throw ValidationError("unknown risk_model '" + s + "'");
}

namespace {

// Phantom geometry, in mm within a 64 mm cube: a soft-tissue body ellipsoid
// holding two air-like lung ellipsoids, exterior air everywhere else.
constexpr double kExtentMm = 64.0;
constexpr double kBodySemi[3] = {26.0, 24.0, 28.0};
constexpr double kLungSemi[3] = {10.0, 12.0, 17.0};
constexpr double kLungOffsetX = 13.0;
constexpr float kAirHu = -1000.0f;
constexpr float kBodyHu = 40.0f;
constexpr float kLungHu = -800.0f;

// Per-scan z spacing rotates through scanner-like protocols.
constexpr double kZSpacings[4] = {1.0, 1.25, 1.6, 2.0};

bool inside_ellipsoid(double x, double y, double z, const double* center, const double* semi) {
    const double a = (x - center[0]) / semi[0];
    const double b = (y - center[1]) / semi[1];
    const double c = (z - center[2]) / semi[2];
    return a * a + b * b + c * c <= 1.0;
}

std::string patient_name(int index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "p%03d", index);
    return buf;
}

struct SurvivalProfile {
    bool deceased = false;
    bool transplant = false;
    double years_after_last_scan = 0.0;  // to event or to end of follow-up
};

SurvivalProfile draw_survival(std::mt19937_64& eng, bool bad_outcome) {
    SurvivalProfile p;
    if (bad_outcome) {
        p.deceased = true;
        p.transplant = uniform01(eng) < 0.15;
        p.years_after_last_scan = uniform_real(eng, 0.3, 1.2);
        return p;
    }
    const double mix = uniform01(eng);
    if (mix < 0.70) {  // long survivor
        p.years_after_last_scan = uniform_real(eng, 6.0, 10.0);
    } else if (mix < 0.85) {  // late death, beyond every window
        p.deceased = true;
        p.transplant = uniform01(eng) < 0.15;
        p.years_after_last_scan = uniform_real(eng, 5.5, 9.0);
    } else {  // short follow-up, censored at the longer windows
        p.years_after_last_scan = uniform_real(eng, 0.5, 2.0);
    }
    return p;
}

Label expected_label(bool deceased, double days_to_event_or_followup, int window) {
    const double window_days = window * kDaysPerYear;
    if (deceased) return days_to_event_or_followup <= window_days ? Label::Positive : Label::Negative;
    return days_to_event_or_followup >= window_days ? Label::Negative : Label::Censored;
}

}  // namespace

std::pair<VolumeGrid, MaskGrid> phantom_scan_volume(const PhantomSpec& spec, int patient_index,
                                                    int scan_index, bool high_risk) {
    auto geometry_eng = make_engine(
        derive_seed(derive_seed(derive_seed(spec.seed, "geometry"), static_cast<std::uint64_t>(patient_index)),
                    static_cast<std::uint64_t>(scan_index)));
    const double sz = kZSpacings[uniform_index(geometry_eng, 4)];
    const std::array<int, 3> dims{64, 64, std::max(1, static_cast<int>(std::llround(kExtentMm / sz)))};
    const std::array<double, 3> spacing{1.0, 1.0, sz};

    VolumeGrid v(dims, spacing, IntensityUnit::HU);
    MaskGrid lungs(dims, spacing);

    const double center[3] = {kExtentMm / 2.0, kExtentMm / 2.0, kExtentMm / 2.0};
    const double left_center[3] = {center[0] - kLungOffsetX, center[1], center[2]};
    const double right_center[3] = {center[0] + kLungOffsetX, center[1], center[2]};

    for (int z = 0; z < dims[2]; ++z)
        for (int y = 0; y < dims[1]; ++y)
            for (int x = 0; x < dims[0]; ++x) {
                const double px = x * spacing[0], py = y * spacing[1], pz = z * spacing[2];
                float hu = kAirHu;
                if (inside_ellipsoid(px, py, pz, left_center, kLungSemi) ||
                    inside_ellipsoid(px, py, pz, right_center, kLungSemi)) {
                    hu = kLungHu;
                    lungs.at(x, y, z) = 1;
                } else if (inside_ellipsoid(px, py, pz, center, kBodySemi)) {
                    hu = kBodyHu;
                }
                v.at(x, y, z) = hu;
            }

    // In-lung white noise plus, for high-risk patients, band-limited texture
    // of the configured amplitude (RMS texture_contrast / 2).
    auto noise_eng = make_engine(
        derive_seed(derive_seed(derive_seed(spec.seed, "noise"), static_cast<std::uint64_t>(patient_index)),
                    static_cast<std::uint64_t>(scan_index)));
    const double texture_amp = high_risk ? spec.texture_contrast : 0.0;
    if (spec.noise_sd > 0.0 || texture_amp > 0.0) {
        VolumeGrid white(dims, spacing, IntensityUnit::Arbitrary);
        for (Eigen::Index i = 0; i < white.voxels.size(); ++i)
            white.voxels[i] = static_cast<float>(normal01(noise_eng));
        // One pass of separable [1,2,1]/4 smoothing correlates neighbors
        // while keeping the field high-frequency.
        VolumeGrid smooth = white;
        auto clampi = [](int i, int n) { return std::min(std::max(i, 0), n - 1); };
        for (int axis = 0; axis < 3; ++axis) {
            VolumeGrid next = smooth;
            for (int z = 0; z < dims[2]; ++z)
                for (int y = 0; y < dims[1]; ++y)
                    for (int x = 0; x < dims[0]; ++x) {
                        int lo[3] = {x, y, z}, hi[3] = {x, y, z};
                        lo[axis] = clampi(lo[axis] - 1, dims[axis]);
                        hi[axis] = clampi(hi[axis] + 1, dims[axis]);
                        next.at(x, y, z) = 0.25f * smooth.at(lo[0], lo[1], lo[2]) +
                                           0.5f * smooth.at(x, y, z) +
                                           0.25f * smooth.at(hi[0], hi[1], hi[2]);
                    }
            smooth = std::move(next);
        }
        // Normalize the smoothed field to unit RMS inside the lungs.
        double sum_sq = 0.0;
        std::int64_t count = 0;
        for (Eigen::Index i = 0; i < smooth.voxels.size(); ++i)
            if (lungs.voxels[i]) {
                sum_sq += static_cast<double>(smooth.voxels[i]) * smooth.voxels[i];
                ++count;
            }
        const double rms = count > 0 ? std::sqrt(sum_sq / static_cast<double>(count)) : 1.0;
        const double texture_scale = rms > 0.0 ? (texture_amp / 2.0) / rms : 0.0;

        for (Eigen::Index i = 0; i < v.voxels.size(); ++i) {
            if (!lungs.voxels[i]) continue;
            double value = v.voxels[i];
            value += spec.noise_sd * normal01(noise_eng);
            value += texture_scale * smooth.voxels[i];
            v.voxels[i] = static_cast<float>(value);
        }
    }
    return {std::move(v), std::move(lungs)};
}

GeneratedCohort generate_cohort(const PhantomSpec& spec, const std::filesystem::path& dir, unsigned jobs) {
    if (spec.n_patients < 1) throw ValidationError("generate_cohort: n_patients must be at least 1");
    if (spec.min_scans_per_patient < 1 || spec.max_scans_per_patient < spec.min_scans_per_patient)
        throw ValidationError("generate_cohort: bad scans_per_patient range");
    if (spec.texture_contrast < 0.0 || spec.noise_sd < 0.0)
        throw ValidationError("generate_cohort: texture_contrast and noise_sd must be non-negative");

    std::filesystem::create_directories(dir / "volumes");

    struct PatientPlan {
        PatientRecord record;
        PhantomGroundTruth::Patient truth;
        std::vector<ScanRecord> scans;
        std::vector<PhantomGroundTruth::Scan> scan_truths;
        bool high_risk = false;
    };
    std::vector<PatientPlan> plans(static_cast<std::size_t>(spec.n_patients));

    // Records and dates are cheap: draw them serially for one fixed stream,
    // then rasterize volumes in parallel.
    for (int pi = 0; pi < spec.n_patients; ++pi) {
        auto eng = make_engine(derive_seed(derive_seed(spec.seed, "timeline"), static_cast<std::uint64_t>(pi)));
        PatientPlan& plan = plans[static_cast<std::size_t>(pi)];
        const std::string patient_id = patient_name(pi);

        plan.high_risk = uniform01(eng) < 0.5;
        const bool bad_outcome =
            spec.risk_model == RiskModel::TextureLinked ? plan.high_risk : uniform01(eng) < 0.5;

        const int n_scans =
            static_cast<int>(uniform_int(eng, spec.min_scans_per_patient, spec.max_scans_per_patient));
        const Date base = parse_date("2005-01-01");
        Date scan_date = add_days(base, uniform_real(eng, 0.0, 13.0 * kDaysPerYear));
        std::vector<Date> scan_dates;
        for (int si = 0; si < n_scans; ++si) {
            scan_dates.push_back(scan_date);
            scan_date = add_days(scan_date, uniform_real(eng, 0.5 * kDaysPerYear, 1.0 * kDaysPerYear));
        }
        const Date last_scan = scan_dates.back();

        const SurvivalProfile survival = draw_survival(eng, bad_outcome);
        const Date horizon = add_days(last_scan, survival.years_after_last_scan * kDaysPerYear);

        plan.record.patient_id = patient_id;
        plan.record.last_followup_date = horizon;
        if (survival.deceased) {
            plan.record.event_type = survival.transplant ? EventType::Transplant : EventType::Death;
            plan.record.event_date = horizon;
        }
        plan.truth = {patient_id, plan.high_risk, survival.deceased};

        // ILD flag: high-risk scans are ILD-positive; low-risk patients are
        // mostly negative with some unknowns.
        std::optional<bool> ild;
        if (plan.high_risk) ild = true;
        else {
            const double mix = uniform01(eng);
            if (mix < 0.70) ild = false;
            else if (mix < 0.90) ild = true;
            else ild = std::nullopt;
        }

        for (int si = 0; si < n_scans; ++si) {
            ScanRecord s;
            s.scan_id = patient_id + "_s" + std::to_string(si);
            s.patient_id = patient_id;
            s.scan_date = scan_dates[static_cast<std::size_t>(si)];
            s.ild_positive = ild;
            s.volume_path = "volumes/" + s.scan_id + ".vgrid";
            plan.scans.push_back(s);

            PhantomGroundTruth::Scan st;
            st.scan_id = s.scan_id;
            st.patient_id = patient_id;
            st.texture_amplitude = plan.high_risk ? spec.texture_contrast : 0.0;
            const double span_days = days_between(s.scan_date, horizon);
            st.expected_1y = expected_label(survival.deceased, span_days, 1);
            st.expected_3y = expected_label(survival.deceased, span_days, 3);
            st.expected_5y = expected_label(survival.deceased, span_days, 5);
            plan.scan_truths.push_back(st);
        }
    }

    // Rasterize and write the volume/mask pairs.
    struct Job {
        int patient_index;
        int scan_index;
        const ScanRecord* scan;
        bool high_risk;
    };
    std::vector<Job> work;
    for (int pi = 0; pi < spec.n_patients; ++pi)
        for (std::size_t si = 0; si < plans[static_cast<std::size_t>(pi)].scans.size(); ++si)
            work.push_back({pi, static_cast<int>(si), &plans[static_cast<std::size_t>(pi)].scans[si],
                            plans[static_cast<std::size_t>(pi)].high_risk});
    parallel_for(work.size(), jobs, [&](std::size_t i) {
        const Job& job = work[i];
        auto [volume, mask] = phantom_scan_volume(spec, job.patient_index, job.scan_index, job.high_risk);
        const auto header = dir / job.scan->volume_path;
        save_volume(header, volume, VgridDtype::I16);
        auto mask_path = header;
        mask_path.replace_filename(header.stem().string() + "_mask.vgrid");
        save_mask(mask_path, mask);
    });

    GeneratedCohort cohort;
    for (auto& plan : plans) {
        cohort.patients.push_back(plan.record);
        cohort.ground_truth.patients.push_back(plan.truth);
        for (std::size_t si = 0; si < plan.scans.size(); ++si) {
            cohort.scans.push_back(plan.scans[si]);
            cohort.ground_truth.scans.push_back(plan.scan_truths[si]);
        }
    }
    write_scans_csv(dir / "scans.csv", cohort.scans);
    write_patients_csv(dir / "patients.csv", cohort.patients);
    write_ground_truth_json(dir / "ground_truth.json", cohort.ground_truth);
    return cohort;
}

namespace {
using nlohmann::json;
}

void write_ground_truth_json(const std::filesystem::path& path, const PhantomGroundTruth& gt) {
    json j;
    j["patients"] = json::array();
    for (const auto& p : gt.patients)
        j["patients"].push_back({{"patient_id", p.patient_id}, {"high_risk", p.high_risk}, {"deceased", p.deceased}});
    j["scans"] = json::array();
    for (const auto& s : gt.scans)
        j["scans"].push_back({{"scan_id", s.scan_id},
                              {"patient_id", s.patient_id},
                              {"texture_amplitude", s.texture_amplitude},
                              {"expected_1y", to_string(s.expected_1y)},
                              {"expected_3y", to_string(s.expected_3y)},
                              {"expected_5y", to_string(s.expected_5y)}});
    std::ofstream out(path, std::ios::binary);
    if (!out) throw RuntimeFailure("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

PhantomGroundTruth read_ground_truth_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw RuntimeFailure("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError("malformed ground truth " + path.string() + ": " + e.what());
    }
    PhantomGroundTruth gt;
    for (const auto& p : j.at("patients"))
        gt.patients.push_back({p.at("patient_id").get<std::string>(), p.at("high_risk").get<bool>(),
                               p.at("deceased").get<bool>()});
    for (const auto& s : j.at("scans")) {
        PhantomGroundTruth::Scan st;
        st.scan_id = s.at("scan_id").get<std::string>();
        st.patient_id = s.at("patient_id").get<std::string>();
        st.texture_amplitude = s.at("texture_amplitude").get<double>();
        st.expected_1y = label_from_string(s.at("expected_1y").get<std::string>());
        st.expected_3y = label_from_string(s.at("expected_3y").get<std::string>());
        st.expected_5y = label_from_string(s.at("expected_5y").get<std::string>());
        gt.scans.push_back(std::move(st));
    }
    return gt;
}

}  // namespace radmort
