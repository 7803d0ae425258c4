#include "radmort/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

#include "radmort/csv.hpp"
#include "radmort/metrics.hpp"
#include "radmort/parallel.hpp"
#include "radmort/preprocess.hpp"
#include "radmort/rng.hpp"
#include "radmort/segment.hpp"
#include "radmort/vgrid_io.hpp"

namespace radmort {

namespace {

using nlohmann::json;

json config_to_json(const PipelineConfig& c) {
    json j;
    j["out_dir"] = c.out_dir.string();
    j["data_dir"] = c.data_dir.string();
    j["seed"] = c.seed;
    j["jobs"] = c.jobs;
    j["synth"] = {{"n_patients", c.synth.n_patients},
                  {"scans_per_patient", {c.synth.min_scans_per_patient, c.synth.max_scans_per_patient}},
                  {"risk_model", to_string(c.synth.risk_model)},
                  {"texture_contrast", c.synth.texture_contrast},
                  {"noise_sd", c.synth.noise_sd}};
    j["preprocess"] = {{"target_mm", c.preprocess.target_mm},
                       {"hu_window", {c.preprocess.hu_lo, c.preprocess.hu_hi}}};
    j["extract"] = {{"bin_width_hu", c.extract.bin_width_hu}};
    j["labeling"] = {{"censored_as_negative", c.labeling.censored_as_negative}};
    j["split"] = {{"strategy", to_string(c.split.strategy)},
                  {"k", c.split.k},
                  {"val_frac_of_holdout", c.split.val_frac_of_holdout},
                  {"holdout_fracs", c.split.holdout_fracs}};
    j["models"] = {{"kinds", c.models.kinds}, {"use_class_weights", c.models.use_class_weights}};
    j["hpo"] = {{"n_trials", c.hpo.n_trials}, {"strategy", to_string(c.hpo.strategy)}};
    j["windows_years"] = c.windows_years;
    j["controls"] = {{"permute_labels", c.controls.permute_labels}};
    return j;
}

}  // namespace

std::string config_to_json_string(const PipelineConfig& config) { return config_to_json(config).dump(2); }

PipelineConfig PipelineConfig::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError("malformed config " + path.string() + ": " + e.what());
    }
    PipelineConfig c;
    try {
        if (j.contains("out_dir")) c.out_dir = j["out_dir"].get<std::string>();
        if (j.contains("data_dir")) c.data_dir = j["data_dir"].get<std::string>();
        if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
        if (j.contains("jobs")) c.jobs = j["jobs"].get<unsigned>();
        if (j.contains("synth")) {
            const auto& s = j["synth"];
            if (s.contains("n_patients")) c.synth.n_patients = s["n_patients"].get<int>();
            if (s.contains("scans_per_patient")) {
                c.synth.min_scans_per_patient = s["scans_per_patient"].at(0).get<int>();
                c.synth.max_scans_per_patient = s["scans_per_patient"].at(1).get<int>();
            }
            if (s.contains("risk_model")) c.synth.risk_model = risk_model_from_string(s["risk_model"].get<std::string>());
            if (s.contains("texture_contrast")) c.synth.texture_contrast = s["texture_contrast"].get<double>();
            if (s.contains("noise_sd")) c.synth.noise_sd = s["noise_sd"].get<double>();
        }
        if (j.contains("preprocess")) {
            const auto& p = j["preprocess"];
            if (p.contains("target_mm")) c.preprocess.target_mm = p["target_mm"].get<double>();
            if (p.contains("hu_window")) {
                c.preprocess.hu_lo = p["hu_window"].at(0).get<double>();
                c.preprocess.hu_hi = p["hu_window"].at(1).get<double>();
            }
        }
        if (j.contains("extract") && j["extract"].contains("bin_width_hu"))
            c.extract.bin_width_hu = j["extract"]["bin_width_hu"].get<double>();
        if (j.contains("labeling") && j["labeling"].contains("censored_as_negative"))
            c.labeling.censored_as_negative = j["labeling"]["censored_as_negative"].get<bool>();
        if (j.contains("split")) {
            const auto& s = j["split"];
            if (s.contains("strategy")) c.split.strategy = split_strategy_from_string(s["strategy"].get<std::string>());
            if (s.contains("k")) c.split.k = s["k"].get<int>();
            if (s.contains("val_frac_of_holdout")) c.split.val_frac_of_holdout = s["val_frac_of_holdout"].get<double>();
            if (s.contains("holdout_fracs"))
                for (int i = 0; i < 3; ++i)
                    c.split.holdout_fracs[static_cast<std::size_t>(i)] = s["holdout_fracs"].at(static_cast<std::size_t>(i)).get<double>();
        }
        if (j.contains("models")) {
            const auto& m = j["models"];
            if (m.contains("kinds")) c.models.kinds = m["kinds"].get<std::vector<std::string>>();
            if (m.contains("use_class_weights")) c.models.use_class_weights = m["use_class_weights"].get<bool>();
        }
        if (j.contains("hpo")) {
            const auto& h = j["hpo"];
            if (h.contains("n_trials")) c.hpo.n_trials = h["n_trials"].get<int>();
            if (h.contains("strategy")) c.hpo.strategy = search_strategy_from_string(h["strategy"].get<std::string>());
        }
        if (j.contains("windows_years")) c.windows_years = j["windows_years"].get<std::vector<int>>();
        if (j.contains("controls") && j["controls"].contains("permute_labels"))
            c.controls.permute_labels = j["controls"]["permute_labels"].get<bool>();
    } catch (const json::exception& e) {
        throw ValidationError("bad config field in " + path.string() + ": " + e.what());
    }
    c.validate();
    return c;
}

void PipelineConfig::validate() const {
    if (out_dir.empty()) throw ValidationError("config: out_dir must not be empty");
    if (synth.n_patients < 1) throw ValidationError("config: synth.n_patients must be positive");
    if (synth.min_scans_per_patient < 1 || synth.max_scans_per_patient < synth.min_scans_per_patient)
        throw ValidationError("config: synth.scans_per_patient range is invalid");
    if (!(preprocess.target_mm > 0.0)) throw ValidationError("config: preprocess.target_mm must be positive");
    if (!(preprocess.hu_lo < preprocess.hu_hi)) throw ValidationError("config: preprocess.hu_window requires lo < hi");
    if (!(extract.bin_width_hu > 0.0)) throw ValidationError("config: extract.bin_width_hu must be positive");
    if (split.k < 2) throw ValidationError("config: split.k must be at least 2");
    if (hpo.n_trials < 1) throw ValidationError("config: hpo.n_trials must be positive");
    if (windows_years.empty()) throw ValidationError("config: windows_years must not be empty");
    for (int w : windows_years)
        if (w != 1 && w != 3 && w != 5)
            throw ValidationError("config: windows_years entries must be 1, 3 or 5");
    for (const auto& kind : models.kinds)
        if (kind != "logreg" && kind != "gbt")
            throw ValidationError("config: unknown model kind '" + kind + "'");
}

namespace {

// ---------------------------------------------------------------------
// Artifact layout and plumbing shared by the stage drivers.

std::filesystem::path stage_dir(const PipelineConfig& c, const std::string& stage) {
    if (stage == "synth") return c.resolved_data_dir();
    return c.out_dir / stage;
}

void write_snapshot(const PipelineConfig& c, const std::string& stage) {
    const auto dir = stage_dir(c, stage);
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / "config_snapshot.json", std::ios::binary);
    if (!out) throw RuntimeFailure("cannot write config snapshot for stage " + stage);
    out << config_to_json_string(c) << '\n';
}

void require_artifact(const std::filesystem::path& path, const std::string& producing_stage) {
    if (!std::filesystem::exists(path))
        throw MissingArtifactError("missing artifact " + path.string() + " (produced by `" +
                                   producing_stage + "`)");
}

std::filesystem::path mask_path_for(const std::filesystem::path& volume_header) {
    auto p = volume_header;
    p.replace_filename(volume_header.stem().string() + "_mask.vgrid");
    return p;
}

std::uint64_t stage_seed(const PipelineConfig& c, const std::string& tag) { return derive_seed(c.seed, tag); }

// Labels as consumed by modeling stages: optionally the permuted-label
// control (a seeded shuffle of the label tuples across scans).
std::vector<LabeledScan> load_modeling_labels(const PipelineConfig& c) {
    const auto path = stage_dir(c, "labels") / "labels.csv";
    require_artifact(path, "label");
    std::vector<LabeledScan> labeled = read_labels_csv(path);
    if (c.controls.permute_labels) {
        std::vector<std::array<Label, 3>> tuples;
        tuples.reserve(labeled.size());
        for (const auto& l : labeled) tuples.push_back({l.label_1y, l.label_3y, l.label_5y});
        auto eng = make_engine(stage_seed(c, "permute-labels"));
        shuffle_inplace(eng, tuples);
        for (std::size_t i = 0; i < labeled.size(); ++i) {
            labeled[i].label_1y = tuples[i][0];
            labeled[i].label_3y = tuples[i][1];
            labeled[i].label_5y = tuples[i][2];
        }
    }
    return labeled;
}

// Feature rows and binary labels for the non-censored scans of one window,
// restricted to `scan_ids`.
struct TaskData {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    std::vector<std::string> scan_ids;
};

TaskData task_data(const FeatureTable& table, const std::vector<LabeledScan>& labeled, int window,
                   const std::vector<std::string>& scan_ids, bool censored_as_negative) {
    std::unordered_map<std::string, std::size_t> row_of;
    for (std::size_t r = 0; r < table.scan_ids.size(); ++r) row_of[table.scan_ids[r]] = r;
    std::unordered_map<std::string, Label> label_of;
    for (const auto& l : labeled) label_of[l.scan_id] = l.at_window(window);

    std::vector<std::size_t> rows;
    std::vector<double> ys;
    TaskData out;
    for (const auto& id : scan_ids) {
        auto lit = label_of.find(id);
        if (lit == label_of.end())
            throw ValidationError("scan '" + id + "' has no label (labels.csv out of date?)");
        Label lab = lit->second;
        if (lab == Label::Censored) {
            if (!censored_as_negative) continue;
            lab = Label::Negative;
        }
        auto rit = row_of.find(id);
        if (rit == row_of.end())
            throw ValidationError("scan '" + id + "' has no feature row (features.csv out of date?)");
        rows.push_back(rit->second);
        ys.push_back(lab == Label::Positive ? 1.0 : 0.0);
        out.scan_ids.push_back(id);
    }
    out.X.resize(static_cast<Eigen::Index>(rows.size()), table.values.cols());
    out.y.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.X.row(static_cast<Eigen::Index>(i)) = table.values.row(static_cast<Eigen::Index>(rows[i]));
        out.y[static_cast<Eigen::Index>(i)] = ys[i];
    }
    return out;
}

ClassWeights weights_for(const PipelineConfig& c, const Eigen::VectorXd& y) {
    return c.models.use_class_weights ? compute_class_weights(y) : ClassWeights::unit();
}

std::string task_name(int window) { return std::to_string(window) + "y"; }

// ---------------------------------------------------------------------
// Model construction from hyperparameters.

TrainedModel fit_model(const std::string& kind, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                       const ClassWeights& weights, const ParamMap& params, std::uint64_t seed) {
    TrainedModel model;
    model.kind = kind;
    if (kind == "logreg") {
        LogRegConfig config;
        config.l2 = param_as_double(params, "l2");
        config.learning_rate = param_as_double(params, "learning_rate");
        model.standardizer = fit_standardizer(X);
        model.logreg = train_logreg(model.standardizer->transform(X), y, weights, config);
    } else if (kind == "gbt") {
        GbtConfig config;
        config.max_depth = static_cast<int>(param_as_int(params, "max_depth"));
        config.n_trees = static_cast<int>(param_as_int(params, "n_trees"));
        config.learning_rate = param_as_double(params, "learning_rate");
        config.bag_fraction = param_as_double(params, "bag_fraction");
        config.seed = seed;
        model.gbt = train_gbt(X, y, weights, config);
    } else {
        throw ValidationError("unknown model kind '" + kind + "'");
    }
    return model;
}

SearchSpace space_for(const std::string& kind) {
    return kind == "logreg" ? SearchSpace::logreg_default() : SearchSpace::gbt_default();
}

}  // namespace

Eigen::VectorXd TrainedModel::predict(const Eigen::MatrixXd& X) const {
    if (kind == "logreg") {
        if (!standardizer || !logreg) throw ValidationError("incomplete logreg model");
        return predict_proba(*logreg, standardizer->transform(X));
    }
    if (!gbt) throw ValidationError("incomplete gbt model");
    return predict_proba(*gbt, X);
}

// ---------------------------------------------------------------------
// Stages.

void run_synth(const PipelineConfig& config) {
    PhantomSpec spec;
    spec.n_patients = config.synth.n_patients;
    spec.min_scans_per_patient = config.synth.min_scans_per_patient;
    spec.max_scans_per_patient = config.synth.max_scans_per_patient;
    spec.risk_model = config.synth.risk_model;
    spec.texture_contrast = config.synth.texture_contrast;
    spec.noise_sd = config.synth.noise_sd;
    spec.seed = stage_seed(config, "synth");
    generate_cohort(spec, config.resolved_data_dir(), config.jobs);
    write_snapshot(config, "synth");
}

void run_preprocess(const PipelineConfig& config) {
    const auto data = config.resolved_data_dir();
    require_artifact(data / "scans.csv", "synth");
    const auto scans = read_scans_csv(data / "scans.csv");
    const auto out = stage_dir(config, "preproc");
    std::filesystem::create_directories(out);

    parallel_for(scans.size(), config.jobs, [&](std::size_t i) {
        const ScanRecord& scan = scans[i];
        const auto volume_header = data / scan.volume_path;
        require_artifact(volume_header, "synth");
        const VolumeGrid raw = load_volume(volume_header);

        const VolumeGrid resampled = resample_isotropic(raw, config.preprocess.target_mm);
        MaskGrid mask;
        const auto provided_mask = mask_path_for(volume_header);
        if (std::filesystem::exists(provided_mask)) {
            mask = resample_mask(load_mask(provided_mask), config.preprocess.target_mm);
        } else {
            mask = threshold_segment_lungs(resampled);
        }
        const VolumeGrid masked = apply_mask(resampled, mask);
        const VolumeGrid normalized = clip_normalize_hu(masked, config.preprocess.hu_lo, config.preprocess.hu_hi);

        save_volume(out / (scan.scan_id + ".vgrid"), normalized, VgridDtype::F32);
        save_mask(out / (scan.scan_id + "_mask.vgrid"), mask);
    });
    write_snapshot(config, "preproc");
}

void run_extract(const PipelineConfig& config) {
    const auto data = config.resolved_data_dir();
    require_artifact(data / "scans.csv", "synth");
    const auto scans = read_scans_csv(data / "scans.csv");
    const auto preproc = stage_dir(config, "preproc");
    const auto out = stage_dir(config, "features");
    std::filesystem::create_directories(out);

    ExtractionConfig extraction;
    extraction.bin_width_hu = config.extract.bin_width_hu;
    extraction.hu_window_lo = config.preprocess.hu_lo;
    extraction.hu_window_hi = config.preprocess.hu_hi;

    FeatureTable table;
    table.scan_ids.resize(scans.size());
    table.patient_ids.resize(scans.size());
    table.values.resize(static_cast<Eigen::Index>(scans.size()),
                        static_cast<Eigen::Index>(all_feature_names().size()));

    parallel_for(scans.size(), config.jobs, [&](std::size_t i) {
        const ScanRecord& scan = scans[i];
        const auto volume_path = preproc / (scan.scan_id + ".vgrid");
        require_artifact(volume_path, "preprocess");
        const VolumeGrid v = load_volume(volume_path);
        const MaskGrid m = load_mask(preproc / (scan.scan_id + "_mask.vgrid"));
        const FeatureVector fv = extract_features(v, m, extraction, scan.scan_id);
        table.scan_ids[i] = scan.scan_id;
        table.patient_ids[i] = scan.patient_id;
        table.values.row(static_cast<Eigen::Index>(i)) = fv.values.transpose();
    });

    write_feature_table(out / "features.csv", table);
    json provenance;
    provenance["bin_width_hu"] = extraction.bin_width_hu;
    provenance["hu_window"] = {extraction.hu_window_lo, extraction.hu_window_hi};
    provenance["glcm_distance"] = 1;
    provenance["glcm_directions"] = 13;
    provenance["glszm_connectivity"] = 26;
    provenance["feature_count"] = all_feature_names().size();
    provenance["schema_version"] = 1;
    std::ofstream sidecar(out / "extraction_config.json", std::ios::binary);
    sidecar << provenance.dump(2) << '\n';
    write_snapshot(config, "features");
}

void run_label(const PipelineConfig& config) {
    const auto data = config.resolved_data_dir();
    require_artifact(data / "scans.csv", "synth");
    require_artifact(data / "patients.csv", "synth");
    const auto labeled = assign_labels(read_scans_csv(data / "scans.csv"), read_patients_csv(data / "patients.csv"));
    const auto out = stage_dir(config, "labels");
    std::filesystem::create_directories(out);
    write_labels_csv(out / "labels.csv", labeled);
    write_snapshot(config, "labels");
}

void run_split(const PipelineConfig& config) {
    const auto labeled = load_modeling_labels(config);
    std::vector<SplitPlan> plans;
    if (config.split.strategy == SplitStrategy::GroupedKfold) {
        plans = grouped_kfold(labeled, config.split.k, config.split.val_frac_of_holdout,
                              stage_seed(config, "split-kfold"));
    }
    // One stratified holdout per window: used for hyperparameter tuning, and
    // as the modeling split when the strategy is stratified-holdout.
    for (int w : config.windows_years)
        plans.push_back(stratified_holdout(labeled, config.split.holdout_fracs, w,
                                           stage_seed(config, "split-holdout-" + task_name(w))));
    const auto out = stage_dir(config, "splits");
    std::filesystem::create_directories(out);
    write_splits_json(out / "splits.json", plans);
    write_snapshot(config, "splits");
}

namespace {

std::vector<SplitPlan> load_plans(const PipelineConfig& config) {
    const auto path = stage_dir(config, "splits") / "splits.json";
    require_artifact(path, "split");
    return read_splits_json(path);
}

const SplitPlan& holdout_plan_for(const std::vector<SplitPlan>& plans, int window) {
    for (const auto& p : plans)
        if (p.strategy == SplitStrategy::StratifiedHoldout && p.window_years && *p.window_years == window)
            return p;
    throw MissingArtifactError("splits.json has no stratified holdout plan for " + task_name(window) +
                               " (produced by `split`)");
}

std::vector<const SplitPlan*> modeling_plans(const PipelineConfig& config,
                                             const std::vector<SplitPlan>& plans, int window) {
    std::vector<const SplitPlan*> out;
    if (config.split.strategy == SplitStrategy::GroupedKfold) {
        for (const auto& p : plans)
            if (p.strategy == SplitStrategy::GroupedKfold) out.push_back(&p);
        if (out.empty())
            throw MissingArtifactError("splits.json has no grouped-kfold plans (produced by `split`)");
    } else {
        out.push_back(&holdout_plan_for(plans, window));
    }
    return out;
}

FeatureTable load_features(const PipelineConfig& config) {
    const auto path = stage_dir(config, "features") / "features.csv";
    require_artifact(path, "extract");
    return read_feature_table(path);
}

std::filesystem::path model_path(const PipelineConfig& config, int window, const std::string& kind, int fold) {
    return stage_dir(config, "models") /
           ("model_" + task_name(window) + "_" + kind + "_fold" + std::to_string(fold) + ".json");
}

}  // namespace

void run_tune(const PipelineConfig& config) {
    const auto labeled = load_modeling_labels(config);
    const FeatureTable features = load_features(config);
    const auto plans = load_plans(config);
    const auto out = stage_dir(config, "tune");
    std::filesystem::create_directories(out);

    for (int window : config.windows_years) {
        const SplitPlan& holdout = holdout_plan_for(plans, window);
        const TaskData train = task_data(features, labeled, window, holdout.train,
                                         config.labeling.censored_as_negative);
        const TaskData val = task_data(features, labeled, window, holdout.validation,
                                       config.labeling.censored_as_negative);
        if (train.y.size() == 0 || val.y.size() == 0)
            throw ValidationError("tune: empty train or validation set at " + task_name(window));
        const ClassWeights weights = weights_for(config, train.y);

        for (const auto& kind : config.models.kinds) {
            const auto tune_seed = stage_seed(config, "tune-" + task_name(window) + "-" + kind);
            // Validation objective: unweighted mean cross-entropy of the
            // class-weighted model on the held-out patients.
            auto objective = [&](const ParamMap& params) {
                const TrainedModel model =
                    fit_model(kind, train.X, train.y, weights, params, derive_seed(tune_seed, "fit"));
                return weighted_cross_entropy(model.predict(val.X), val.y, ClassWeights::unit());
            };
            const SearchResult result = run_search(space_for(kind), objective, config.hpo.n_trials,
                                                   tune_seed, config.hpo.strategy, config.jobs);
            write_trials_csv(out / ("trials_" + task_name(window) + "_" + kind + ".csv"), result.trials);
            write_best_json(out / ("best_" + task_name(window) + "_" + kind + ".json"), result.best);
        }
    }
    write_snapshot(config, "tune");
}

void run_train(const PipelineConfig& config) {
    const auto labeled = load_modeling_labels(config);
    const FeatureTable features = load_features(config);
    const auto plans = load_plans(config);
    const auto out = stage_dir(config, "models");
    std::filesystem::create_directories(out);

    for (int window : config.windows_years) {
        for (const auto& kind : config.models.kinds) {
            const auto best_path = stage_dir(config, "tune") / ("best_" + task_name(window) + "_" + kind + ".json");
            require_artifact(best_path, "tune");
            const ParamMap params = read_params_json(best_path);

            const auto fold_plans = modeling_plans(config, plans, window);
            parallel_for(fold_plans.size(), config.jobs, [&](std::size_t f) {
                const SplitPlan& plan = *fold_plans[f];
                const TaskData train = task_data(features, labeled, window, plan.train,
                                                 config.labeling.censored_as_negative);
                if (train.y.size() == 0)
                    throw ValidationError("train: empty training set at " + task_name(window) + " fold " +
                                          std::to_string(plan.fold_id));
                const ClassWeights weights = weights_for(config, train.y);
                TrainedModel model = fit_model(
                    kind, train.X, train.y, weights, params,
                    stage_seed(config, "train-" + task_name(window) + "-" + kind + "-fold" +
                                           std::to_string(plan.fold_id)));
                model.window_years = window;
                model.fold_id = plan.fold_id;
                save_model_json(model_path(config, window, kind, plan.fold_id), model);
            });
        }
    }
    write_snapshot(config, "models");
}

void run_evaluate(const PipelineConfig& config) {
    const auto labeled = load_modeling_labels(config);
    const FeatureTable features = load_features(config);
    const auto plans = load_plans(config);
    const auto out = stage_dir(config, "eval");
    std::filesystem::create_directories(out);

    std::vector<EvalReport> reports;
    for (int window : config.windows_years) {
        for (const auto& kind : config.models.kinds) {
            const auto fold_plans = modeling_plans(config, plans, window);
            std::vector<Eigen::VectorXd> fold_scores, fold_labels;
            for (const SplitPlan* plan : fold_plans) {
                const auto path = model_path(config, window, kind, plan->fold_id);
                require_artifact(path, "train");
                const TrainedModel model = load_model_json(path);
                const TaskData test = task_data(features, labeled, window, plan->test,
                                                config.labeling.censored_as_negative);
                // A fold whose eligible test scans are all censored away
                // contributes nothing to the pooled evaluation.
                if (test.y.size() == 0) continue;
                fold_scores.push_back(model.predict(test.X));
                fold_labels.push_back(test.y);
            }
            if (fold_scores.empty())
                throw ValidationError("evaluate: no eligible test scans at " + task_name(window));
            EvalReport report = assemble_report(task_name(window), kind, fold_scores, fold_labels);
            reports.push_back(report);

            Eigen::Index total = 0;
            for (const auto& s : fold_scores) total += s.size();
            Eigen::VectorXd pooled_scores(total), pooled_labels(total);
            Eigen::Index offset = 0;
            for (std::size_t f = 0; f < fold_scores.size(); ++f) {
                pooled_scores.segment(offset, fold_scores[f].size()) = fold_scores[f];
                pooled_labels.segment(offset, fold_labels[f].size()) = fold_labels[f];
                offset += fold_scores[f].size();
            }
            write_roc_csv(out / ("roc_" + task_name(window) + "_" + kind + ".csv"),
                          roc_points(pooled_scores, pooled_labels));
        }
    }
    write_report_json(out / "report.json", reports);
    write_snapshot(config, "eval");
}

void run_report(const PipelineConfig& config) {
    const auto data = config.resolved_data_dir();
    require_artifact(data / "scans.csv", "synth");
    require_artifact(data / "patients.csv", "synth");
    const auto report_path = stage_dir(config, "eval") / "report.json";
    require_artifact(report_path, "evaluate");

    const auto out = stage_dir(config, "report");
    std::filesystem::create_directories(out);

    // Metric summary table, one row per task x model.
    std::ifstream in(report_path);
    json evaluation;
    in >> evaluation;
    CsvTable table;
    table.header = {"task", "model", "auroc", "sensitivity", "specificity", "precision", "f1"};
    for (const auto& r : evaluation) {
        const auto& pooled = r.at("pooled");
        table.rows.push_back({r.at("task").get<std::string>(), r.at("model").get<std::string>(),
                              format_double(pooled.at("auroc").get<double>()),
                              format_double(pooled.at("sensitivity").get<double>()),
                              format_double(pooled.at("specificity").get<double>()),
                              format_double(pooled.at("precision").get<double>()),
                              format_double(pooled.at("f1").get<double>())});
    }
    write_csv(out / "report_table.csv", table);

    // Cohort description tables.
    const auto scans = read_scans_csv(data / "scans.csv");
    const auto patients = read_patients_csv(data / "patients.csv");
    write_summary_csvs(out, cohort_summary(scans, patients));

    // Class prevalence per window.
    const auto labeled = assign_labels(scans, patients);
    CsvTable prevalence;
    prevalence.header = {"window", "n_total", "n_positive", "positive_pct"};
    for (int w : config.windows_years) {
        const auto [total, positive] = class_counts(labeled, w, config.labeling.censored_as_negative);
        const double pct = total > 0 ? 100.0 * static_cast<double>(positive) / static_cast<double>(total) : 0.0;
        prevalence.rows.push_back({task_name(w), std::to_string(total), std::to_string(positive),
                                   format_double(pct)});
    }
    write_csv(out / "class_prevalence.csv", prevalence);
    write_snapshot(config, "report");
}

// ---------------------------------------------------------------------
// Model serialization.

void save_model_json(const std::filesystem::path& path, const TrainedModel& model) {
    json j;
    j["schema_version"] = 1;
    j["kind"] = model.kind;
    j["window_years"] = model.window_years;
    j["fold_id"] = model.fold_id;
    j["feature_names"] = all_feature_names();
    if (model.standardizer) {
        j["standardizer"]["mean"] = std::vector<double>(model.standardizer->mean.data(),
                                                        model.standardizer->mean.data() + model.standardizer->mean.size());
        j["standardizer"]["std"] = std::vector<double>(model.standardizer->std.data(),
                                                       model.standardizer->std.data() + model.standardizer->std.size());
    }
    if (model.logreg) {
        j["logreg"]["weights"] = std::vector<double>(model.logreg->weights.data(),
                                                     model.logreg->weights.data() + model.logreg->weights.size());
        j["logreg"]["intercept"] = model.logreg->intercept;
        j["logreg"]["config"] = {{"learning_rate", model.logreg->config.learning_rate},
                                 {"max_iterations", model.logreg->config.max_iterations},
                                 {"l2", model.logreg->config.l2},
                                 {"gradient_tol", model.logreg->config.gradient_tol}};
    }
    if (model.gbt) {
        j["gbt"]["base_score"] = model.gbt->base_score;
        j["gbt"]["learning_rate"] = model.gbt->learning_rate;
        j["gbt"]["n_features"] = model.gbt->n_features;
        json trees = json::array();
        for (const auto& t : model.gbt->trees)
            trees.push_back({{"feature", t.feature},
                             {"threshold", t.threshold},
                             {"left", t.left},
                             {"right", t.right},
                             {"value", t.value}});
        j["gbt"]["trees"] = std::move(trees);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw RuntimeFailure("cannot write model file " + path.string());
    out << j.dump(2) << '\n';
}

TrainedModel load_model_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw RuntimeFailure("cannot open model file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ValidationError("malformed model file " + path.string() + ": " + e.what());
    }
    TrainedModel model;
    model.kind = j.at("kind").get<std::string>();
    model.window_years = j.at("window_years").get<int>();
    model.fold_id = j.at("fold_id").get<int>();
    if (j.contains("standardizer")) {
        Standardizer s;
        const auto mean = j["standardizer"].at("mean").get<std::vector<double>>();
        const auto std_vals = j["standardizer"].at("std").get<std::vector<double>>();
        s.mean = Eigen::Map<const Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
        s.std = Eigen::Map<const Eigen::VectorXd>(std_vals.data(), static_cast<Eigen::Index>(std_vals.size()));
        model.standardizer = std::move(s);
    }
    if (j.contains("logreg")) {
        LogRegModel lr;
        const auto weights = j["logreg"].at("weights").get<std::vector<double>>();
        lr.weights = Eigen::Map<const Eigen::VectorXd>(weights.data(), static_cast<Eigen::Index>(weights.size()));
        lr.intercept = j["logreg"].at("intercept").get<double>();
        const auto& cfg = j["logreg"].at("config");
        lr.config.learning_rate = cfg.at("learning_rate").get<double>();
        lr.config.max_iterations = cfg.at("max_iterations").get<int>();
        lr.config.l2 = cfg.at("l2").get<double>();
        lr.config.gradient_tol = cfg.at("gradient_tol").get<double>();
        model.logreg = std::move(lr);
    }
    if (j.contains("gbt")) {
        GbtModel g;
        g.base_score = j["gbt"].at("base_score").get<double>();
        g.learning_rate = j["gbt"].at("learning_rate").get<double>();
        g.n_features = j["gbt"].at("n_features").get<int>();
        for (const auto& t : j["gbt"].at("trees")) {
            GbtTree tree;
            tree.feature = t.at("feature").get<std::vector<int>>();
            tree.threshold = t.at("threshold").get<std::vector<double>>();
            tree.left = t.at("left").get<std::vector<int>>();
            tree.right = t.at("right").get<std::vector<int>>();
            tree.value = t.at("value").get<std::vector<double>>();
            g.trees.push_back(std::move(tree));
        }
        model.gbt = std::move(g);
    }
    return model;
}

}  // namespace radmort
