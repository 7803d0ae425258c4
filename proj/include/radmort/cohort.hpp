#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "radmort/dates.hpp"

namespace radmort {

struct ScanRecord {
    std::string scan_id;
    std::string patient_id;
    Date scan_date;
    std::optional<bool> ild_positive;
    std::string volume_path;  // relative to the data directory
};

enum class EventType { Death, Transplant, None };

struct PatientRecord {
    std::string patient_id;
    EventType event_type = EventType::None;
    std::optional<Date> event_date;
    Date last_followup_date;

    bool deceased() const { return event_type != EventType::None; }
};

enum class Label { Positive, Negative, Censored };

std::string to_string(Label l);
Label label_from_string(const std::string& s);

// Mortality labels at the three prediction windows. Death and transplant
// are equivalent endpoints. At window w years (365.25 w days):
//   event and event_date - scan_date <= w  -> positive
//   event beyond w, or no event with last_followup - scan_date >= w -> negative
//   otherwise -> censored
struct LabeledScan {
    std::string scan_id;
    std::string patient_id;
    Label label_1y = Label::Censored;
    Label label_3y = Label::Censored;
    Label label_5y = Label::Censored;

    Label at_window(int years) const;
};

inline constexpr std::array<int, 3> kWindowsYears{1, 3, 5};

std::vector<LabeledScan> assign_labels(const std::vector<ScanRecord>& scans,
                                       const std::vector<PatientRecord>& patients);

// (n_total non-censored, n_positive) at one window. With
// censored_as_negative, censored scans count as negatives instead of being
// excluded.
std::pair<std::int64_t, std::int64_t> class_counts(const std::vector<LabeledScan>& labeled, int window_years,
                                                   bool censored_as_negative = false);

// Cohort summary tables: scans per calendar year, and whole-year histograms
// of first-ILD-CT-to-death and last-CT-to-death durations among deceased
// patients.
struct CohortSummary {
    std::map<int, std::int64_t> scans_per_year;
    std::map<int, std::int64_t> first_ild_ct_to_death_years;  // bucket [y, y+1)
    std::map<int, std::int64_t> last_ct_to_death_years;
};

CohortSummary cohort_summary(const std::vector<ScanRecord>& scans, const std::vector<PatientRecord>& patients);

// CSV interchange.
std::vector<ScanRecord> read_scans_csv(const std::filesystem::path& path);
std::vector<PatientRecord> read_patients_csv(const std::filesystem::path& path);
void write_scans_csv(const std::filesystem::path& path, const std::vector<ScanRecord>& scans);
void write_patients_csv(const std::filesystem::path& path, const std::vector<PatientRecord>& patients);
std::vector<LabeledScan> read_labels_csv(const std::filesystem::path& path);
void write_labels_csv(const std::filesystem::path& path, const std::vector<LabeledScan>& labeled);
void write_summary_csvs(const std::filesystem::path& dir, const CohortSummary& summary);

}  // namespace radmort
