#include "doctest.h"

#include <set>
#include <unordered_map>
#include <unordered_set>

#include "radmort/rng.hpp"
#include "radmort/splits.hpp"
#include "test_helpers.hpp"

using namespace radmort;

namespace {

// Random labeled cohort: patients with 1..4 scans and a patient-level
// positive flag applied to each scan's 3y label.
std::vector<LabeledScan> random_cohort(std::mt19937_64& eng, int n_patients, double positive_rate = 0.3) {
    std::vector<LabeledScan> out;
    for (int p = 0; p < n_patients; ++p) {
        const bool positive = uniform01(eng) < positive_rate;
        const int n_scans = static_cast<int>(uniform_int(eng, 1, 4));
        for (int s = 0; s < n_scans; ++s) {
            LabeledScan l;
            l.scan_id = "p" + std::to_string(p) + "_s" + std::to_string(s);
            l.patient_id = "p" + std::to_string(p);
            l.label_1y = Label::Negative;
            l.label_3y = positive ? Label::Positive : Label::Negative;
            l.label_5y = l.label_3y;
            out.push_back(l);
        }
    }
    return out;
}

std::unordered_map<std::string, std::string> patient_of(const std::vector<LabeledScan>& labeled) {
    std::unordered_map<std::string, std::string> out;
    for (const auto& l : labeled) out[l.scan_id] = l.patient_id;
    return out;
}

std::set<std::string> patients_in(const std::vector<std::string>& scan_ids,
                                  const std::unordered_map<std::string, std::string>& lookup) {
    std::set<std::string> out;
    for (const auto& id : scan_ids) out.insert(lookup.at(id));
    return out;
}

bool disjoint(const std::set<std::string>& a, const std::set<std::string>& b) {
    for (const auto& x : a)
        if (b.count(x)) return false;
    return true;
}

void check_no_leakage(const SplitPlan& plan, const std::vector<LabeledScan>& labeled) {
    const auto lookup = patient_of(labeled);
    const auto train = patients_in(plan.train, lookup);
    const auto val = patients_in(plan.validation, lookup);
    const auto test = patients_in(plan.test, lookup);
    CHECK(disjoint(train, val));
    CHECK(disjoint(train, test));
    CHECK(disjoint(val, test));
    // Union covers every scan exactly once.
    std::unordered_set<std::string> seen;
    for (const auto* part : {&plan.train, &plan.validation, &plan.test})
        for (const auto& id : *part) CHECK(seen.insert(id).second);
    CHECK(seen.size() == labeled.size());
}

}  // namespace

TEST_CASE("grouped k-fold: coverage and disjointness on 10 patients") {
    auto eng = make_engine(61);
    const auto labeled = random_cohort(eng, 10);
    const auto plans = grouped_kfold(labeled, 5, 0.5, 42);
    REQUIRE(plans.size() == 5);

    const auto lookup = patient_of(labeled);
    std::set<std::string> all_patients;
    for (const auto& l : labeled) all_patients.insert(l.patient_id);

    std::set<std::string> holdout_union;
    for (const auto& plan : plans) {
        check_no_leakage(plan, labeled);
        auto holdout = patients_in(plan.validation, lookup);
        const auto test = patients_in(plan.test, lookup);
        holdout.insert(test.begin(), test.end());
        CHECK(holdout.size() == 2);  // 10 patients / 5 folds
        for (const auto& p : holdout) CHECK(holdout_union.insert(p).second);  // disjoint across folds
    }
    CHECK(holdout_union == all_patients);  // every patient held out exactly once
}

TEST_CASE("grouped k-fold keeps a patient's scans together") {
    std::vector<LabeledScan> labeled;
    for (int p = 0; p < 6; ++p)
        for (int s = 0; s < 3; ++s) {
            LabeledScan l;
            l.scan_id = "p" + std::to_string(p) + "_s" + std::to_string(s);
            l.patient_id = "p" + std::to_string(p);
            labeled.push_back(l);
        }
    for (const auto& plan : grouped_kfold(labeled, 3, 0.5, 9)) {
        const auto lookup = patient_of(labeled);
        for (const auto* part : {&plan.train, &plan.validation, &plan.test}) {
            std::unordered_map<std::string, int> scans_per_patient;
            for (const auto& id : *part) ++scans_per_patient[lookup.at(id)];
            for (const auto& [patient, count] : scans_per_patient) CHECK(count == 3);
        }
    }
}

TEST_CASE("grouped k-fold determinism and seed sensitivity") {
    auto eng = make_engine(62);
    const auto labeled = random_cohort(eng, 25);
    const auto a = grouped_kfold(labeled, 5, 0.5, 7);
    const auto b = grouped_kfold(labeled, 5, 0.5, 7);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].train == b[i].train);
        CHECK(a[i].validation == b[i].validation);
        CHECK(a[i].test == b[i].test);
    }
    const auto c = grouped_kfold(labeled, 5, 0.5, 8);
    bool any_difference = false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].train != c[i].train) any_difference = true;
    CHECK(any_difference);
}

TEST_CASE("grouped k-fold needs at least k patients") {
    auto eng = make_engine(63);
    const auto labeled = random_cohort(eng, 4);
    CHECK_THROWS_AS(grouped_kfold(labeled, 5, 0.5, 1), ValidationError);
}

TEST_CASE("stratified holdout: fractions and stratification") {
    std::vector<LabeledScan> labeled;
    for (int p = 0; p < 100; ++p) {
        LabeledScan l;
        l.scan_id = "p" + std::to_string(p) + "_s0";
        l.patient_id = "p" + std::to_string(p);
        l.label_3y = p < 20 ? Label::Positive : Label::Negative;
        labeled.push_back(l);
    }
    const SplitPlan plan = stratified_holdout(labeled, {0.64, 0.16, 0.20}, 3, 99);
    check_no_leakage(plan, labeled);

    auto positives_in = [&](const std::vector<std::string>& ids) {
        int count = 0;
        for (const auto& id : ids) count += std::stoi(id.substr(1)) < 20;  // stoi stops at '_'
        return count;
    };
    // Single scan per patient: scan counts equal patient counts.
    CHECK(std::abs(static_cast<int>(plan.test.size()) - 20) <= 1);
    CHECK(std::abs(static_cast<int>(plan.validation.size()) - 16) <= 1);
    CHECK(std::abs(static_cast<int>(plan.train.size()) - 64) <= 1);
    CHECK(std::abs(positives_in(plan.test) - 4) <= 1);
    CHECK(std::abs(positives_in(plan.validation) - 3) <= 1);
}

TEST_CASE("stratified holdout rejects bad inputs") {
    auto eng = make_engine(64);
    const auto labeled = random_cohort(eng, 20, 0.5);
    CHECK_THROWS_AS(stratified_holdout(labeled, {0.5, 0.2, 0.2}, 3, 1), ValidationError);

    const auto all_negative = random_cohort(eng, 20, 0.0);
    CHECK_THROWS_AS(stratified_holdout(all_negative, {0.64, 0.16, 0.20}, 3, 1), ValidationError);
}

TEST_CASE("leakage impossibility over randomized cohorts") {
    auto eng = make_engine(65);
    for (int trial = 0; trial < 60; ++trial) {
        const int n_patients = static_cast<int>(uniform_int(eng, 6, 40));
        const auto labeled = random_cohort(eng, n_patients, 0.4);
        const auto k = static_cast<int>(uniform_int(eng, 2, std::min(6, n_patients)));
        for (const auto& plan : grouped_kfold(labeled, k, 0.5, eng()))
            check_no_leakage(plan, labeled);

        bool has_pos = false, has_neg = false;
        for (const auto& l : labeled) (l.label_3y == Label::Positive ? has_pos : has_neg) = true;
        if (has_pos && has_neg)
            check_no_leakage(stratified_holdout(labeled, {0.64, 0.16, 0.20}, 3, eng()), labeled);
    }
}

TEST_CASE("splits JSON round trip") {
    testutil::TempDir tmp("splits");
    auto eng = make_engine(66);
    const auto labeled = random_cohort(eng, 12, 0.5);
    auto plans = grouped_kfold(labeled, 3, 0.5, 5);
    plans.push_back(stratified_holdout(labeled, {0.64, 0.16, 0.20}, 3, 5));

    write_splits_json(tmp.path / "splits.json", plans);
    const auto back = read_splits_json(tmp.path / "splits.json");
    REQUIRE(back.size() == plans.size());
    for (std::size_t i = 0; i < plans.size(); ++i) {
        CHECK(back[i].strategy == plans[i].strategy);
        CHECK(back[i].seed == plans[i].seed);
        CHECK(back[i].fold_id == plans[i].fold_id);
        CHECK(back[i].window_years == plans[i].window_years);
        CHECK(back[i].train == plans[i].train);
        CHECK(back[i].validation == plans[i].validation);
        CHECK(back[i].test == plans[i].test);
    }
}
