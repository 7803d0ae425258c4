#include "radmort/hpo.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "json.hpp"

#include "radmort/csv.hpp"
#include "radmort/errors.hpp"
#include "radmort/parallel.hpp"
#include "radmort/rng.hpp"

namespace radmort {

double param_as_double(const ParamMap& params, const std::string& name) {
    auto it = params.find(name);
    if (it == params.end()) throw ValidationError("missing hyperparameter '" + name + "'");
    if (const auto* d = std::get_if<double>(&it->second)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&it->second)) return static_cast<double>(*i);
    throw ValidationError("hyperparameter '" + name + "' is not numeric");
}

std::int64_t param_as_int(const ParamMap& params, const std::string& name) {
    auto it = params.find(name);
    if (it == params.end()) throw ValidationError("missing hyperparameter '" + name + "'");
    if (const auto* i = std::get_if<std::int64_t>(&it->second)) return *i;
    throw ValidationError("hyperparameter '" + name + "' is not an integer");
}

SearchSpace SearchSpace::logreg_default() {
    SearchSpace s;
    s.params["l2"] = {ParamSpec::Kind::Continuous, 1e-6, 1.0, true, {}};
    s.params["learning_rate"] = {ParamSpec::Kind::Continuous, 1e-4, 1e-1, true, {}};
    return s;
}

SearchSpace SearchSpace::gbt_default() {
    SearchSpace s;
    s.params["max_depth"] = {ParamSpec::Kind::Integer, 2, 8, false, {}};
    s.params["n_trees"] = {ParamSpec::Kind::Integer, 50, 500, false, {}};
    s.params["learning_rate"] = {ParamSpec::Kind::Continuous, 1e-2, 3e-1, true, {}};
    s.params["bag_fraction"] = {ParamSpec::Kind::Continuous, 0.5, 1.0, false, {}};
    return s;
}

std::string to_string(SearchStrategy s) {
    return s == SearchStrategy::Random ? "random" : "coarse-to-fine";
}

SearchStrategy search_strategy_from_string(const std::string& s) {
    if (s == "random") return SearchStrategy::Random;
    if (s == "coarse-to-fine") return SearchStrategy::CoarseToFine;
    throw ValidationError("unknown search strategy '" + s + "'");
}

namespace {

void validate_space(const SearchSpace& space) {
    if (space.params.empty()) throw ValidationError("run_search: empty search space");
    for (const auto& [name, spec] : space.params) {
        if (spec.kind == ParamSpec::Kind::Categorical) {
            if (spec.categories.empty())
                throw ValidationError("run_search: categorical parameter '" + name + "' has no categories");
            continue;
        }
        if (!(spec.lo < spec.hi))
            throw ValidationError("run_search: parameter '" + name + "' requires lo < hi");
        if (spec.log_scale && !(spec.lo > 0.0))
            throw ValidationError("run_search: log-scale parameter '" + name + "' requires lo > 0");
    }
}

ParamValue sample_param(const ParamSpec& spec, std::mt19937_64& eng) {
    switch (spec.kind) {
        case ParamSpec::Kind::Continuous:
            if (spec.log_scale)
                return std::exp(uniform_real(eng, std::log(spec.lo), std::log(spec.hi)));
            return uniform_real(eng, spec.lo, spec.hi);
        case ParamSpec::Kind::Integer:
            return uniform_int(eng, static_cast<std::int64_t>(spec.lo), static_cast<std::int64_t>(spec.hi));
        case ParamSpec::Kind::Categorical:
            return spec.categories[uniform_index(eng, spec.categories.size())];
    }
    throw ValidationError("run_search: bad parameter kind");
}

ParamMap sample_all(const SearchSpace& space, std::uint64_t seed, int trial_id) {
    // Each (trial, parameter) pair gets its own stream so adding a
    // parameter does not reshuffle the others.
    ParamMap params;
    for (const auto& [name, spec] : space.params) {
        auto eng = make_engine(derive_seed(derive_seed(seed, static_cast<std::uint64_t>(trial_id)), name));
        params[name] = sample_param(spec, eng);
    }
    return params;
}

// Shrink continuous/integer ranges to half width around the incumbent,
// clamped inside the original bounds.
SearchSpace refine_around(const SearchSpace& original, const SearchSpace& current, const ParamMap& incumbent) {
    SearchSpace next = current;
    for (auto& [name, spec] : next.params) {
        if (spec.kind == ParamSpec::Kind::Categorical) continue;
        const ParamSpec& bounds = original.params.at(name);
        const double center = param_as_double(incumbent, name);
        if (spec.kind == ParamSpec::Kind::Continuous && spec.log_scale) {
            const double half = 0.25 * (std::log(spec.hi) - std::log(spec.lo));
            double lo = std::exp(std::log(center) - half), hi = std::exp(std::log(center) + half);
            spec.lo = std::max(bounds.lo, lo);
            spec.hi = std::min(bounds.hi, hi);
        } else {
            const double half = 0.25 * (spec.hi - spec.lo);
            spec.lo = std::max(bounds.lo, center - half);
            spec.hi = std::min(bounds.hi, center + half);
        }
        if (spec.kind == ParamSpec::Kind::Integer) {
            spec.lo = std::floor(spec.lo);
            spec.hi = std::ceil(spec.hi);
        }
        if (!(spec.lo < spec.hi)) {  // collapsed range: hold the incumbent's bin
            spec.lo = bounds.lo;
            spec.hi = bounds.hi;
        }
    }
    return next;
}

TrialRecord evaluate_trial(const SearchSpace& space, const std::function<double(const ParamMap&)>& objective,
                           std::uint64_t seed, int trial_id) {
    TrialRecord rec;
    rec.trial_id = trial_id;
    rec.params = sample_all(space, seed, trial_id);
    try {
        rec.loss = objective(rec.params);
        if (!std::isfinite(rec.loss)) throw RuntimeFailure("non-finite loss");
        rec.status = TrialStatus::Ok;
    } catch (const std::exception&) {
        rec.loss = std::numeric_limits<double>::quiet_NaN();
        rec.status = TrialStatus::Failed;
    }
    return rec;
}

}  // namespace

SearchResult run_search(const SearchSpace& space, const std::function<double(const ParamMap&)>& objective,
                        int n_trials, std::uint64_t seed, SearchStrategy strategy, unsigned jobs) {
    validate_space(space);
    if (n_trials < 1) throw ValidationError("run_search: n_trials must be at least 1");

    SearchResult result;
    result.trials.resize(static_cast<std::size_t>(n_trials));

    if (strategy == SearchStrategy::Random) {
        // Trials are independent; evaluation order cannot change the log.
        parallel_for(static_cast<std::size_t>(n_trials), jobs, [&](std::size_t t) {
            result.trials[t] = evaluate_trial(space, objective, seed, static_cast<int>(t));
        });
    } else {
        SearchSpace current = space;
        const int refine_every = std::max(1, n_trials / 4);
        const TrialRecord* incumbent = nullptr;
        for (int t = 0; t < n_trials; ++t) {
            if (t > 0 && t % refine_every == 0 && incumbent != nullptr)
                current = refine_around(space, current, incumbent->params);
            result.trials[static_cast<std::size_t>(t)] = evaluate_trial(current, objective, seed, t);
            const TrialRecord& rec = result.trials[static_cast<std::size_t>(t)];
            if (rec.status == TrialStatus::Ok && (incumbent == nullptr || rec.loss < incumbent->loss))
                incumbent = &result.trials[static_cast<std::size_t>(t)];
        }
    }

    const TrialRecord* best = nullptr;
    for (const auto& rec : result.trials)
        if (rec.status == TrialStatus::Ok && (best == nullptr || rec.loss < best->loss)) best = &rec;
    if (best == nullptr) throw ValidationError("run_search: all trials failed");
    result.best = *best;
    return result;
}

namespace {

using nlohmann::json;

std::string param_to_string(const ParamValue& v) {
    if (const auto* d = std::get_if<double>(&v)) return format_double(*d);
    if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
    return std::get<std::string>(v);
}

json params_to_json(const ParamMap& params) {
    json j = json::object();
    for (const auto& [name, value] : params) {
        if (const auto* d = std::get_if<double>(&value)) j[name] = *d;
        else if (const auto* i = std::get_if<std::int64_t>(&value)) j[name] = *i;
        else j[name] = std::get<std::string>(value);
    }
    return j;
}

}  // namespace

void write_trials_csv(const std::filesystem::path& path, const std::vector<TrialRecord>& trials) {
    CsvTable csv;
    csv.header = {"trial_id"};
    if (!trials.empty())
        for (const auto& [name, value] : trials.front().params) csv.header.push_back(name);
    csv.header.push_back("loss");
    csv.header.push_back("status");
    for (const auto& rec : trials) {
        std::vector<std::string> row{std::to_string(rec.trial_id)};
        for (const auto& [name, value] : rec.params) row.push_back(param_to_string(value));
        row.push_back(rec.status == TrialStatus::Ok ? format_double(rec.loss) : "nan");
        row.push_back(rec.status == TrialStatus::Ok ? "ok" : "failed");
        csv.rows.push_back(std::move(row));
    }
    write_csv(path, csv);
}

void write_best_json(const std::filesystem::path& path, const TrialRecord& best) {
    json j;
    j["trial_id"] = best.trial_id;
    j["loss"] = best.loss;
    j["params"] = params_to_json(best.params);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw RuntimeFailure("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

ParamMap read_params_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw RuntimeFailure("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError("malformed params file " + path.string() + ": " + e.what());
    }
    ParamMap params;
    for (const auto& [name, value] : j.at("params").items()) {
        if (value.is_number_integer()) params[name] = value.get<std::int64_t>();
        else if (value.is_number_float()) params[name] = value.get<double>();
        else params[name] = value.get<std::string>();
    }
    return params;
}

}  // namespace radmort
