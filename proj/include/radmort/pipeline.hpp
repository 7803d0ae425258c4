#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "radmort/features.hpp"
#include "radmort/hpo.hpp"
#include "radmort/models.hpp"
#include "radmort/splits.hpp"
#include "radmort/synth.hpp"

namespace radmort {

// Resolved run configuration. One root seed feeds every stage through
// derived per-stage seeds; flags override file values before any stage runs.
struct PipelineConfig {
    std::filesystem::path out_dir = "out";
    std::filesystem::path data_dir;  // empty: out_dir / "data"
    std::uint64_t seed = 20240801;
    unsigned jobs = 0;  // 0: hardware concurrency

    struct Synth {
        int n_patients = 60;
        int min_scans_per_patient = 1;
        int max_scans_per_patient = 4;
        RiskModel risk_model = RiskModel::TextureLinked;
        double texture_contrast = 200.0;
        double noise_sd = 30.0;
    } synth;

    struct Preprocess {
        double target_mm = 1.0;
        double hu_lo = -1200.0;
        double hu_hi = 600.0;
    } preprocess;

    struct Extract {
        double bin_width_hu = 25.0;
    } extract;

    struct Labeling {
        bool censored_as_negative = false;
    } labeling;

    struct Split {
        SplitStrategy strategy = SplitStrategy::GroupedKfold;
        int k = 5;
        double val_frac_of_holdout = 0.5;
        std::array<double, 3> holdout_fracs{0.64, 0.16, 0.20};
    } split;

    struct Models {
        std::vector<std::string> kinds{"logreg", "gbt"};
        bool use_class_weights = true;
    } models;

    struct Hpo {
        int n_trials = 500;
        SearchStrategy strategy = SearchStrategy::Random;
    } hpo;

    std::vector<int> windows_years{1, 3, 5};

    struct Controls {
        bool permute_labels = false;  // null-model control: shuffle labels across scans
    } controls;

    std::filesystem::path resolved_data_dir() const {
        return data_dir.empty() ? out_dir / "data" : data_dir;
    }

    static PipelineConfig from_json_file(const std::filesystem::path& path);
    void validate() const;
};

std::string config_to_json_string(const PipelineConfig& config);

// Stage drivers. Each reads only its declared upstream artifacts, writes
// only its own output directory, and drops a resolved-config snapshot
// there. A missing upstream artifact raises MissingArtifactError naming the
// producing stage.
void run_synth(const PipelineConfig& config);
void run_preprocess(const PipelineConfig& config);
void run_extract(const PipelineConfig& config);
void run_label(const PipelineConfig& config);
void run_split(const PipelineConfig& config);
void run_tune(const PipelineConfig& config);
void run_train(const PipelineConfig& config);
void run_evaluate(const PipelineConfig& config);
void run_report(const PipelineConfig& config);

// A persisted classifier for one (window, kind).
struct TrainedModel {
    std::string kind;  // "logreg" | "gbt"
    int window_years = 0;
    int fold_id = 0;
    std::optional<Standardizer> standardizer;  // logreg only
    std::optional<LogRegModel> logreg;
    std::optional<GbtModel> gbt;

    Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
};

void save_model_json(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel load_model_json(const std::filesystem::path& path);

}  // namespace radmort
