// radmort - radiomics mortality-risk pipeline driver.
//
// Every stage is a subcommand working off one JSON config; flags override
// config values. Exit codes: 0 success, 1 validation error, 2 missing
// upstream artifact, 3 runtime failure.

#include <cstdio>
#include <functional>
#include <map>
#include <string>

#include "CLI11.hpp"

#include "radmort/errors.hpp"
#include "radmort/pipeline.hpp"

namespace {

using radmort::PipelineConfig;

struct Overrides {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    unsigned jobs = 0;
    bool jobs_set = false;
    bool censored_as_negative = false;
    std::string out_dir;
};

PipelineConfig resolve_config(const Overrides& o) {
    PipelineConfig config;
    if (!o.config_path.empty()) config = PipelineConfig::from_json_file(o.config_path);
    if (o.seed_set) config.seed = o.seed;
    if (o.jobs_set) config.jobs = o.jobs;
    if (o.censored_as_negative) config.labeling.censored_as_negative = true;
    if (!o.out_dir.empty()) config.out_dir = o.out_dir;
    config.validate();
    return config;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"radmort: CT radiomics pipeline for mortality-risk modeling"};
    app.require_subcommand(1);

    Overrides overrides;
    app.add_option("--config", overrides.config_path, "JSON config file (defaults apply when omitted)");
    app.add_option("--seed", overrides.seed, "root seed override")->each([&](const std::string&) {
        overrides.seed_set = true;
    });
    app.add_option("--jobs", overrides.jobs, "worker thread cap (0 = hardware)")->each([&](const std::string&) {
        overrides.jobs_set = true;
    });
    app.add_flag("--censored-as-negative", overrides.censored_as_negative,
                 "treat censored scans as negatives instead of excluding them");
    app.add_option("--out-dir", overrides.out_dir, "output directory override");

    const std::map<std::string, std::pair<const char*, std::function<void(const PipelineConfig&)>>> stages{
        {"synth", {"generate a synthetic phantom cohort", radmort::run_synth}},
        {"preprocess", {"resample, mask and normalize volumes", radmort::run_preprocess}},
        {"extract", {"extract radiomics features", radmort::run_extract}},
        {"label", {"assign mortality-window labels", radmort::run_label}},
        {"split", {"build patient-grouped split plans", radmort::run_split}},
        {"tune", {"hyperparameter search per window and model", radmort::run_tune}},
        {"train", {"train final models with the tuned parameters", radmort::run_train}},
        {"evaluate", {"score test partitions and write metric reports", radmort::run_evaluate}},
        {"report", {"assemble summary tables", radmort::run_report}},
    };
    for (const auto& [name, stage] : stages) app.add_subcommand(name, stage.first)->fallthrough();

    CLI11_PARSE(app, argc, argv);

    try {
        const PipelineConfig config = resolve_config(overrides);
        for (const auto& [name, stage] : stages)
            if (app.got_subcommand(name)) stage.second(config);
        return 0;
    } catch (const radmort::ValidationError& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 1;
    } catch (const radmort::MissingArtifactError& e) {
        std::fprintf(stderr, "missing artifact: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime failure: %s\n", e.what());
        return 3;
    }
}
