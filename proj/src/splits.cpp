#include "radmort/splits.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <unordered_map>

#include "json.hpp"

#include "radmort/errors.hpp"
#include "radmort/rng.hpp"

namespace radmort {

std::string to_string(SplitStrategy s) {
    return s == SplitStrategy::GroupedKfold ? "grouped-kfold" : "stratified-holdout";
}

SplitStrategy split_strategy_from_string(const std::string& s) {
    if (s == "grouped-kfold") return SplitStrategy::GroupedKfold;
    if (s == "stratified-holdout") return SplitStrategy::StratifiedHoldout;
    throw ValidationError("unknown split strategy '" + s + "'");
}

namespace {

struct PatientGroup {
    std::string patient_id;
    std::vector<std::string> scan_ids;
    bool positive = false;  // any scan positive at the stratification window
};

// Deterministic patient order: sort by splitmix-mixed hash of
// (seed, patient_id), ties by id. Independent of input record order.
std::vector<PatientGroup> hashed_patient_order(const std::vector<LabeledScan>& labeled, std::uint64_t seed,
                                               std::optional<int> window_years) {
    std::map<std::string, PatientGroup> by_patient;
    for (const auto& l : labeled) {
        auto& g = by_patient[l.patient_id];
        g.patient_id = l.patient_id;
        g.scan_ids.push_back(l.scan_id);
        if (window_years && l.at_window(*window_years) == Label::Positive) g.positive = true;
    }
    std::vector<PatientGroup> out;
    out.reserve(by_patient.size());
    for (auto& [id, g] : by_patient) {
        std::sort(g.scan_ids.begin(), g.scan_ids.end());
        out.push_back(std::move(g));
    }
    std::stable_sort(out.begin(), out.end(), [seed](const PatientGroup& a, const PatientGroup& b) {
        const auto ha = derive_seed(seed, a.patient_id);
        const auto hb = derive_seed(seed, b.patient_id);
        if (ha != hb) return ha < hb;
        return a.patient_id < b.patient_id;
    });
    return out;
}

void append_scans(std::vector<std::string>& dst, const PatientGroup& g) {
    dst.insert(dst.end(), g.scan_ids.begin(), g.scan_ids.end());
}

}  // namespace

std::vector<SplitPlan> grouped_kfold(const std::vector<LabeledScan>& labeled, int k, double val_frac_of_holdout,
                                     std::uint64_t seed) {
    if (k < 2) throw ValidationError("grouped_kfold: k must be at least 2");
    if (!(val_frac_of_holdout >= 0.0 && val_frac_of_holdout <= 1.0))
        throw ValidationError("grouped_kfold: val_frac_of_holdout must lie in [0, 1]");
    const auto patients = hashed_patient_order(labeled, seed, std::nullopt);
    if (static_cast<int>(patients.size()) < k)
        throw ValidationError("grouped_kfold: " + std::to_string(patients.size()) + " patients < k = " +
                              std::to_string(k));

    // Contiguous near-equal slices of the shuffled patient list.
    const std::size_t n = patients.size();
    std::vector<std::pair<std::size_t, std::size_t>> slices;
    for (int f = 0; f < k; ++f)
        slices.emplace_back(n * static_cast<std::size_t>(f) / static_cast<std::size_t>(k),
                            n * (static_cast<std::size_t>(f) + 1) / static_cast<std::size_t>(k));

    std::vector<SplitPlan> plans;
    for (int f = 0; f < k; ++f) {
        SplitPlan plan;
        plan.strategy = SplitStrategy::GroupedKfold;
        plan.seed = seed;
        plan.fold_id = f;
        const auto [lo, hi] = slices[static_cast<std::size_t>(f)];
        const std::size_t holdout_size = hi - lo;
        const auto n_val = static_cast<std::size_t>(std::llround(val_frac_of_holdout * static_cast<double>(holdout_size)));
        for (std::size_t i = 0; i < n; ++i) {
            if (i < lo || i >= hi) {
                append_scans(plan.train, patients[i]);
            } else if (i - lo < n_val) {
                append_scans(plan.validation, patients[i]);
            } else {
                append_scans(plan.test, patients[i]);
            }
        }
        plans.push_back(std::move(plan));
    }
    return plans;
}

SplitPlan stratified_holdout(const std::vector<LabeledScan>& labeled, std::array<double, 3> fracs,
                             int window_years, std::uint64_t seed) {
    if (std::abs(fracs[0] + fracs[1] + fracs[2] - 1.0) > 1e-9)
        throw ValidationError("stratified_holdout: fractions must sum to 1");
    const auto patients = hashed_patient_order(labeled, seed, window_years);

    std::vector<const PatientGroup*> positives, negatives;
    for (const auto& g : patients) (g.positive ? positives : negatives).push_back(&g);
    if (positives.empty() || negatives.empty())
        throw ValidationError("stratified_holdout: need at least one positive and one negative patient at " +
                              std::to_string(window_years) + "y");

    SplitPlan plan;
    plan.strategy = SplitStrategy::StratifiedHoldout;
    plan.seed = seed;
    plan.fold_id = 0;
    plan.window_years = window_years;

    // Largest-remainder allocation of each stratum across the three
    // partitions, then contiguous assignment in hashed order.
    auto allocate = [&](const std::vector<const PatientGroup*>& stratum) {
        const auto n = static_cast<double>(stratum.size());
        std::array<std::size_t, 3> take{};
        std::array<double, 3> remainder{};
        std::size_t assigned = 0;
        for (int p = 0; p < 3; ++p) {
            const double exact = fracs[static_cast<std::size_t>(p)] * n;
            take[static_cast<std::size_t>(p)] = static_cast<std::size_t>(std::floor(exact));
            remainder[static_cast<std::size_t>(p)] = exact - std::floor(exact);
            assigned += take[static_cast<std::size_t>(p)];
        }
        while (assigned < stratum.size()) {
            int best = 0;
            for (int p = 1; p < 3; ++p)
                if (remainder[static_cast<std::size_t>(p)] > remainder[static_cast<std::size_t>(best)]) best = p;
            ++take[static_cast<std::size_t>(best)];
            remainder[static_cast<std::size_t>(best)] = -1.0;
            ++assigned;
        }
        std::size_t i = 0;
        for (int p = 0; p < 3; ++p) {
            auto& dst = p == 0 ? plan.train : (p == 1 ? plan.validation : plan.test);
            for (std::size_t j = 0; j < take[static_cast<std::size_t>(p)]; ++j) append_scans(dst, *stratum[i++]);
        }
    };
    allocate(negatives);
    allocate(positives);
    return plan;
}

namespace {

using nlohmann::json;

json plan_to_json(const SplitPlan& p) {
    json j;
    j["strategy"] = to_string(p.strategy);
    j["seed"] = p.seed;
    j["fold_id"] = p.fold_id;
    if (p.window_years) j["window_years"] = *p.window_years;
    j["train"] = p.train;
    j["validation"] = p.validation;
    j["test"] = p.test;
    return j;
}

SplitPlan plan_from_json(const json& j) {
    SplitPlan p;
    p.strategy = split_strategy_from_string(j.at("strategy").get<std::string>());
    p.seed = j.at("seed").get<std::uint64_t>();
    p.fold_id = j.at("fold_id").get<int>();
    if (j.contains("window_years")) p.window_years = j.at("window_years").get<int>();
    p.train = j.at("train").get<std::vector<std::string>>();
    p.validation = j.at("validation").get<std::vector<std::string>>();
    p.test = j.at("test").get<std::vector<std::string>>();
    return p;
}

}  // namespace

void write_splits_json(const std::filesystem::path& path, const std::vector<SplitPlan>& plans) {
    json j = json::array();
    for (const auto& p : plans) j.push_back(plan_to_json(p));
    std::ofstream out(path, std::ios::binary);
    if (!out) throw RuntimeFailure("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

std::vector<SplitPlan> read_splits_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw RuntimeFailure("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError("malformed splits file " + path.string() + ": " + e.what());
    }
    std::vector<SplitPlan> plans;
    for (const auto& item : j) plans.push_back(plan_from_json(item));
    return plans;
}

}  // namespace radmort
