#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "radmort/cohort.hpp"

namespace radmort {

enum class SplitStrategy { GroupedKfold, StratifiedHoldout };

std::string to_string(SplitStrategy s);
SplitStrategy split_strategy_from_string(const std::string& s);

// One train/validation/test partition of the scan set. All scans of a
// patient always land in the same partition; the three sets are pairwise
// disjoint and cover every input scan.
struct SplitPlan {
    SplitStrategy strategy = SplitStrategy::GroupedKfold;
    std::uint64_t seed = 0;
    int fold_id = 0;
    std::optional<int> window_years;  // set for stratified holdout plans
    std::vector<std::string> train;
    std::vector<std::string> validation;
    std::vector<std::string> test;
};

// Patients are shuffled by a stable hash of (seed, patient_id), partitioned
// into k near-equal groups; per fold one group is the holdout, split at the
// patient level into validation and test halves (val_frac_of_holdout of its
// patients to validation). Every patient appears in exactly one fold's
// holdout across the k folds.
std::vector<SplitPlan> grouped_kfold(const std::vector<LabeledScan>& labeled, int k, double val_frac_of_holdout,
                                     std::uint64_t seed);

// Patient-stratified single split targeting the given patient-count
// fractions while balancing patient-level prevalence (a patient is positive
// at the window if any of its scans is). fracs must sum to 1 within 1e-9.
SplitPlan stratified_holdout(const std::vector<LabeledScan>& labeled, std::array<double, 3> fracs,
                             int window_years, std::uint64_t seed);

void write_splits_json(const std::filesystem::path& path, const std::vector<SplitPlan>& plans);
std::vector<SplitPlan> read_splits_json(const std::filesystem::path& path);

}  // namespace radmort
