#include "radmort/cohort.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <unordered_set>

#include "radmort/csv.hpp"
#include "radmort/errors.hpp"

namespace radmort {

std::string to_string(Label l) {
    switch (l) {
        case Label::Positive: return "positive";
        case Label::Negative: return "negative";
        case Label::Censored: return "censored";
    }
    return "censored";
}

Label label_from_string(const std::string& s) {
    if (s == "positive") return Label::Positive;
    if (s == "negative") return Label::Negative;
    if (s == "censored") return Label::Censored;
    throw ValidationError("unknown label '" + s + "'");
}

Label LabeledScan::at_window(int years) const {
    switch (years) {
        case 1: return label_1y;
        case 3: return label_3y;
        case 5: return label_5y;
    }
    throw ValidationError("unsupported window " + std::to_string(years) + "y (expected 1, 3 or 5)");
}

namespace {

Label label_at(const ScanRecord& scan, const PatientRecord& patient, int window_years) {
    const double window_days = kDaysPerYear * window_years;
    if (patient.deceased()) {
        const double to_event = days_between(scan.scan_date, *patient.event_date);
        return to_event <= window_days ? Label::Positive : Label::Negative;
    }
    const double followup = days_between(scan.scan_date, patient.last_followup_date);
    return followup >= window_days ? Label::Negative : Label::Censored;
}

std::string event_type_to_string(EventType t) {
    switch (t) {
        case EventType::Death: return "death";
        case EventType::Transplant: return "transplant";
        case EventType::None: return "none";
    }
    return "none";
}

EventType event_type_from_string(const std::string& s) {
    if (s == "death") return EventType::Death;
    if (s == "transplant") return EventType::Transplant;
    if (s == "none") return EventType::None;
    throw ValidationError("unknown event_type '" + s + "'");
}

}  // namespace

std::vector<LabeledScan> assign_labels(const std::vector<ScanRecord>& scans,
                                       const std::vector<PatientRecord>& patients) {
    std::unordered_map<std::string, const PatientRecord*> by_id;
    for (const auto& p : patients) {
        if (!by_id.emplace(p.patient_id, &p).second)
            throw ValidationError("duplicate patient_id '" + p.patient_id + "'");
        if (p.deceased() && !p.event_date.has_value())
            throw ValidationError("patient '" + p.patient_id + "' has an event but no event_date");
    }
    std::unordered_set<std::string> seen_scans;

    std::vector<LabeledScan> out;
    out.reserve(scans.size());
    for (const auto& s : scans) {
        if (!seen_scans.insert(s.scan_id).second)
            throw ValidationError("duplicate scan_id '" + s.scan_id + "'");
        auto it = by_id.find(s.patient_id);
        if (it == by_id.end())
            throw ValidationError("scan '" + s.scan_id + "' references unknown patient '" + s.patient_id + "'");
        const PatientRecord& p = *it->second;
        if (p.deceased() && days_between(s.scan_date, *p.event_date) < 0.0)
            throw ValidationError("scan '" + s.scan_id + "' is dated after the event of patient '" +
                                  s.patient_id + "'");
        if (days_between(s.scan_date, p.last_followup_date) < 0.0)
            throw ValidationError("scan '" + s.scan_id + "' is dated after last follow-up of patient '" +
                                  s.patient_id + "'");
        LabeledScan l;
        l.scan_id = s.scan_id;
        l.patient_id = s.patient_id;
        l.label_1y = label_at(s, p, 1);
        l.label_3y = label_at(s, p, 3);
        l.label_5y = label_at(s, p, 5);
        out.push_back(std::move(l));
    }
    return out;
}

std::pair<std::int64_t, std::int64_t> class_counts(const std::vector<LabeledScan>& labeled, int window_years,
                                                   bool censored_as_negative) {
    std::int64_t total = 0, positive = 0;
    for (const auto& l : labeled) {
        const Label lab = l.at_window(window_years);
        if (lab == Label::Censored && !censored_as_negative) continue;
        ++total;
        positive += lab == Label::Positive;
    }
    return {total, positive};
}

CohortSummary cohort_summary(const std::vector<ScanRecord>& scans, const std::vector<PatientRecord>& patients) {
    CohortSummary summary;
    std::unordered_map<std::string, const PatientRecord*> by_id;
    for (const auto& p : patients) by_id.emplace(p.patient_id, &p);

    std::unordered_map<std::string, Date> first_ild_scan;
    std::unordered_map<std::string, Date> last_scan;
    for (const auto& s : scans) {
        ++summary.scans_per_year[year_of(s.scan_date)];
        auto [last_it, inserted] = last_scan.emplace(s.patient_id, s.scan_date);
        if (!inserted && s.scan_date > last_it->second) last_it->second = s.scan_date;
        if (s.ild_positive.value_or(false)) {
            auto [ild_it, ild_inserted] = first_ild_scan.emplace(s.patient_id, s.scan_date);
            if (!ild_inserted && s.scan_date < ild_it->second) ild_it->second = s.scan_date;
        }
    }

    auto year_bucket = [](double days) { return static_cast<int>(std::floor(days / kDaysPerYear)); };
    for (const auto& [patient_id, date] : first_ild_scan) {
        auto it = by_id.find(patient_id);
        if (it == by_id.end() || !it->second->deceased()) continue;
        ++summary.first_ild_ct_to_death_years[year_bucket(days_between(date, *it->second->event_date))];
    }
    for (const auto& [patient_id, date] : last_scan) {
        auto it = by_id.find(patient_id);
        if (it == by_id.end() || !it->second->deceased()) continue;
        ++summary.last_ct_to_death_years[year_bucket(days_between(date, *it->second->event_date))];
    }
    return summary;
}

std::vector<ScanRecord> read_scans_csv(const std::filesystem::path& path) {
    const CsvTable csv = read_csv(path);
    const int id = csv.column("scan_id");
    const int pid = csv.column("patient_id");
    const int date = csv.column("scan_date");
    const int ild = csv.column("ild_positive");
    const int vol = csv.column("volume_path");
    std::vector<ScanRecord> out;
    out.reserve(csv.rows.size());
    for (const auto& row : csv.rows) {
        ScanRecord s;
        s.scan_id = row[static_cast<std::size_t>(id)];
        s.patient_id = row[static_cast<std::size_t>(pid)];
        s.scan_date = parse_date(row[static_cast<std::size_t>(date)]);
        const std::string& ild_field = row[static_cast<std::size_t>(ild)];
        if (ild_field == "1") s.ild_positive = true;
        else if (ild_field == "0") s.ild_positive = false;
        else if (ild_field == "NA" || ild_field.empty()) s.ild_positive = std::nullopt;
        else throw ValidationError(path.string() + ": ild_positive must be 0, 1 or NA, got '" + ild_field + "'");
        s.volume_path = row[static_cast<std::size_t>(vol)];
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<PatientRecord> read_patients_csv(const std::filesystem::path& path) {
    const CsvTable csv = read_csv(path);
    const int id = csv.column("patient_id");
    const int type = csv.column("event_type");
    const int date = csv.column("event_date");
    const int followup = csv.column("last_followup_date");
    std::vector<PatientRecord> out;
    out.reserve(csv.rows.size());
    for (const auto& row : csv.rows) {
        PatientRecord p;
        p.patient_id = row[static_cast<std::size_t>(id)];
        p.event_type = event_type_from_string(row[static_cast<std::size_t>(type)]);
        const std::string& event_field = row[static_cast<std::size_t>(date)];
        if (!event_field.empty()) p.event_date = parse_date(event_field);
        if (p.deceased() && !p.event_date.has_value())
            throw ValidationError(path.string() + ": patient '" + p.patient_id +
                                  "' has event_type but empty event_date");
        p.last_followup_date = parse_date(row[static_cast<std::size_t>(followup)]);
        out.push_back(std::move(p));
    }
    return out;
}

void write_scans_csv(const std::filesystem::path& path, const std::vector<ScanRecord>& scans) {
    CsvTable csv;
    csv.header = {"scan_id", "patient_id", "scan_date", "ild_positive", "volume_path"};
    for (const auto& s : scans) {
        std::string ild = "NA";
        if (s.ild_positive.has_value()) ild = *s.ild_positive ? "1" : "0";
        csv.rows.push_back({s.scan_id, s.patient_id, format_date(s.scan_date), ild, s.volume_path});
    }
    write_csv(path, csv);
}

void write_patients_csv(const std::filesystem::path& path, const std::vector<PatientRecord>& patients) {
    CsvTable csv;
    csv.header = {"patient_id", "event_type", "event_date", "last_followup_date"};
    for (const auto& p : patients)
        csv.rows.push_back({p.patient_id, event_type_to_string(p.event_type),
                            p.event_date ? format_date(*p.event_date) : "",
                            format_date(p.last_followup_date)});
    write_csv(path, csv);
}

std::vector<LabeledScan> read_labels_csv(const std::filesystem::path& path) {
    const CsvTable csv = read_csv(path);
    const int id = csv.column("scan_id");
    const int pid = csv.column("patient_id");
    const int l1 = csv.column("label_1y");
    const int l3 = csv.column("label_3y");
    const int l5 = csv.column("label_5y");
    std::vector<LabeledScan> out;
    out.reserve(csv.rows.size());
    for (const auto& row : csv.rows) {
        LabeledScan l;
        l.scan_id = row[static_cast<std::size_t>(id)];
        l.patient_id = row[static_cast<std::size_t>(pid)];
        l.label_1y = label_from_string(row[static_cast<std::size_t>(l1)]);
        l.label_3y = label_from_string(row[static_cast<std::size_t>(l3)]);
        l.label_5y = label_from_string(row[static_cast<std::size_t>(l5)]);
        out.push_back(std::move(l));
    }
    return out;
}

void write_labels_csv(const std::filesystem::path& path, const std::vector<LabeledScan>& labeled) {
    CsvTable csv;
    csv.header = {"scan_id", "patient_id", "label_1y", "label_3y", "label_5y"};
    for (const auto& l : labeled)
        csv.rows.push_back({l.scan_id, l.patient_id, to_string(l.label_1y), to_string(l.label_3y),
                            to_string(l.label_5y)});
    write_csv(path, csv);
}

void write_summary_csvs(const std::filesystem::path& dir, const CohortSummary& summary) {
    auto dump = [&](const std::string& name, const std::string& key_column,
                    const std::map<int, std::int64_t>& counts) {
        CsvTable csv;
        csv.header = {key_column, "count"};
        for (const auto& [key, count] : counts)
            csv.rows.push_back({std::to_string(key), std::to_string(count)});
        write_csv(dir / name, csv);
    };
    dump("summary_scans_per_year.csv", "year", summary.scans_per_year);
    dump("summary_first_ild_ct_to_death_years.csv", "years", summary.first_ild_ct_to_death_years);
    dump("summary_last_ct_to_death_years.csv", "years", summary.last_ct_to_death_years);
}

}  // namespace radmort
