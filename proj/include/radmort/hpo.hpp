#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace radmort {

// One sampled hyperparameter value.
using ParamValue = std::variant<double, std::int64_t, std::string>;
using ParamMap = std::map<std::string, ParamValue>;

double param_as_double(const ParamMap& params, const std::string& name);
std::int64_t param_as_int(const ParamMap& params, const std::string& name);

struct ParamSpec {
    enum class Kind { Continuous, Integer, Categorical };
    Kind kind = Kind::Continuous;
    double lo = 0.0;  // continuous/integer bounds (inclusive)
    double hi = 1.0;
    bool log_scale = false;                 // continuous only; requires lo > 0
    std::vector<std::string> categories;    // categorical only
};

struct SearchSpace {
    std::map<std::string, ParamSpec> params;

    static SearchSpace logreg_default();
    static SearchSpace gbt_default();
};

enum class SearchStrategy { Random, CoarseToFine };
std::string to_string(SearchStrategy s);
SearchStrategy search_strategy_from_string(const std::string& s);

enum class TrialStatus { Ok, Failed };

struct TrialRecord {
    int trial_id = 0;
    ParamMap params;
    double loss = 0.0;  // NaN when failed
    TrialStatus status = TrialStatus::Ok;
};

struct SearchResult {
    TrialRecord best;
    std::vector<TrialRecord> trials;
};

// Minimize objective(params) over n_trials draws. Per-trial parameters
// derive from (seed, trial_id) alone, so random-strategy results do not
// depend on evaluation order. Coarse-to-fine halves each continuous or
// integer range around the incumbent best every n_trials/4 trials (clamped
// to the original bounds). Objective failures (thrown exception or
// non-finite loss) are recorded as failed trials; throws ValidationError if
// every trial fails.
SearchResult run_search(const SearchSpace& space, const std::function<double(const ParamMap&)>& objective,
                        int n_trials, std::uint64_t seed, SearchStrategy strategy = SearchStrategy::Random,
                        unsigned jobs = 1);

void write_trials_csv(const std::filesystem::path& path, const std::vector<TrialRecord>& trials);
void write_best_json(const std::filesystem::path& path, const TrialRecord& best);
ParamMap read_params_json(const std::filesystem::path& path);

}  // namespace radmort
