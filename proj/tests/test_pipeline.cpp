#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "radmort/pipeline.hpp"
#include "radmort/metrics.hpp"
#include "test_helpers.hpp"

using namespace radmort;

namespace {

PipelineConfig small_config(const std::filesystem::path& out_dir, std::uint64_t seed = 17) {
    PipelineConfig c;
    c.out_dir = out_dir;
    c.seed = seed;
    c.jobs = 2;
    c.synth.n_patients = 14;
    c.synth.min_scans_per_patient = 1;
    c.synth.max_scans_per_patient = 3;
    c.hpo.n_trials = 6;
    return c;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void run_all(const PipelineConfig& c) {
    run_synth(c);
    run_preprocess(c);
    run_extract(c);
    run_label(c);
    run_split(c);
    run_tune(c);
    run_train(c);
    run_evaluate(c);
    run_report(c);
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(RADMORT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("full pipeline runs and reports on a small cohort") {
    testutil::TempDir tmp("pipe_full");
    const PipelineConfig c = small_config(tmp.path / "out");
    run_all(c);

    CHECK(std::filesystem::exists(c.out_dir / "features" / "features.csv"));
    CHECK(std::filesystem::exists(c.out_dir / "eval" / "report.json"));
    CHECK(std::filesystem::exists(c.out_dir / "report" / "report_table.csv"));
    CHECK(std::filesystem::exists(c.out_dir / "report" / "summary_scans_per_year.csv"));
    CHECK(std::filesystem::exists(c.out_dir / "report" / "class_prevalence.csv"));
    // Config echo: every stage directory carries the resolved snapshot.
    for (const char* stage : {"preproc", "features", "labels", "splits", "tune", "models", "eval", "report"})
        CHECK(std::filesystem::exists(c.out_dir / stage / "config_snapshot.json"));
    CHECK(std::filesystem::exists(c.resolved_data_dir() / "config_snapshot.json"));
    const std::string snapshot = slurp(c.out_dir / "labels" / "config_snapshot.json");
    CHECK(snapshot == config_to_json_string(c) + "\n");
}

TEST_CASE("stage reruns are byte-identical") {
    testutil::TempDir tmp("pipe_rerun");
    const PipelineConfig c = small_config(tmp.path / "out", 23);
    run_synth(c);
    run_preprocess(c);
    run_extract(c);
    run_label(c);
    run_split(c);

    const std::string features = slurp(c.out_dir / "features" / "features.csv");
    const std::string labels = slurp(c.out_dir / "labels" / "labels.csv");
    const std::string splits = slurp(c.out_dir / "splits" / "splits.json");

    // Delete downstream artifacts and regenerate only those stages.
    std::filesystem::remove(c.out_dir / "features" / "features.csv");
    std::filesystem::remove(c.out_dir / "labels" / "labels.csv");
    std::filesystem::remove(c.out_dir / "splits" / "splits.json");
    run_extract(c);
    run_label(c);
    run_split(c);
    CHECK(slurp(c.out_dir / "features" / "features.csv") == features);
    CHECK(slurp(c.out_dir / "labels" / "labels.csv") == labels);
    CHECK(slurp(c.out_dir / "splits" / "splits.json") == splits);

    // A preprocessed volume also reproduces bit-exactly.
    const auto scans = read_scans_csv(c.resolved_data_dir() / "scans.csv");
    const auto sample = c.out_dir / "preproc" / (scans.front().scan_id + ".raw");
    const std::string payload = slurp(sample);
    std::filesystem::remove(sample);
    run_preprocess(c);
    CHECK(slurp(sample) == payload);
}

TEST_CASE("missing upstream artifacts name the producing stage") {
    testutil::TempDir tmp("pipe_missing");
    const PipelineConfig c = small_config(tmp.path / "out");
    CHECK_THROWS_AS(run_preprocess(c), MissingArtifactError);
    run_synth(c);
    CHECK_THROWS_AS(run_train(c), MissingArtifactError);
    try {
        run_train(c);
    } catch (const MissingArtifactError& e) {
        const std::string message = e.what();
        CHECK(message.find("labels.csv") != std::string::npos);
        CHECK(message.find("label") != std::string::npos);
    }
    CHECK_THROWS_AS(run_extract(c), MissingArtifactError);
    try {
        run_extract(c);
    } catch (const MissingArtifactError& e) {
        CHECK(std::string(e.what()).find("preprocess") != std::string::npos);
    }
    // Train before extract: the error names features.csv and its stage.
    run_label(c);
    run_split(c);
    try {
        run_train(c);
        CHECK(false);
    } catch (const MissingArtifactError& e) {
        const std::string message = e.what();
        CHECK(message.find("features.csv") != std::string::npos);
        CHECK(message.find("extract") != std::string::npos);
    }
}

TEST_CASE("censored-as-negative policy changes eligible counts") {
    testutil::TempDir tmp("pipe_censored");
    PipelineConfig c = small_config(tmp.path / "out", 31);
    run_synth(c);
    run_label(c);
    const auto labeled = read_labels_csv(c.out_dir / "labels" / "labels.csv");
    const auto [total_excluded, pos_excluded] = class_counts(labeled, 5, false);
    const auto [total_negative, pos_negative] = class_counts(labeled, 5, true);
    CHECK(total_negative == static_cast<std::int64_t>(labeled.size()));
    CHECK(total_negative >= total_excluded);
    CHECK(pos_negative == pos_excluded);
}

TEST_CASE("trained models round-trip through JSON with identical predictions") {
    testutil::TempDir tmp("pipe_models");
    const PipelineConfig c = small_config(tmp.path / "out", 37);
    run_synth(c);
    run_preprocess(c);
    run_extract(c);
    run_label(c);
    run_split(c);
    run_tune(c);
    run_train(c);

    const FeatureTable features = read_feature_table(c.out_dir / "features" / "features.csv");
    for (const char* kind : {"logreg", "gbt"}) {
        const auto path = c.out_dir / "models" / ("model_5y_" + std::string(kind) + "_fold0.json");
        REQUIRE(std::filesystem::exists(path));
        const TrainedModel model = load_model_json(path);
        const Eigen::VectorXd p1 = model.predict(features.values);
        const TrainedModel reloaded = load_model_json(path);
        const Eigen::VectorXd p2 = reloaded.predict(features.values);
        CHECK((p1.array() == p2.array()).all());
        CHECK((p1.array() > 0.0).all());
        CHECK((p1.array() < 1.0).all());
    }
}

TEST_CASE("cli maps errors to documented exit codes") {
    testutil::TempDir tmp("pipe_cli");
    const auto out_dir = (tmp.path / "out").string();
    const auto config_path = (tmp.path / "config.json").string();
    {
        std::ofstream config(config_path);
        config << R"({"out_dir": ")" << out_dir
               << R"(", "seed": 5, "jobs": 2, "synth": {"n_patients": 8, "scans_per_patient": [1, 2]},
                   "hpo": {"n_trials": 4}})";
    }
    // Stage before its upstream artifacts exist: exit 2.
    CHECK(run_cli("train --config " + config_path) == 2);
    // Bad config value: exit 1.
    {
        std::ofstream bad(tmp.path / "bad.json");
        bad << R"({"preprocess": {"target_mm": -1.0}})";
    }
    CHECK(run_cli("synth --config " + (tmp.path / "bad.json").string()) == 1);
    // Unknown flag: CLI11 parse error (not one of the pipeline codes).
    CHECK(run_cli("synth --definitely-not-a-flag") != 0);

    // Happy path: synth then label exit 0 and write artifacts.
    CHECK(run_cli("synth --config " + config_path) == 0);
    CHECK(run_cli("label --config " + config_path) == 0);
    CHECK(std::filesystem::exists(std::filesystem::path(out_dir) / "labels" / "labels.csv"));

    // Flag override: --censored-as-negative is reflected in the snapshot.
    CHECK(run_cli("label --config " + config_path + " --censored-as-negative") == 0);
    const std::string snapshot = slurp(std::filesystem::path(out_dir) / "labels" / "config_snapshot.json");
    CHECK(snapshot.find("\"censored_as_negative\": true") != std::string::npos);
}

TEST_CASE("permuted-label control destroys test signal") {
    testutil::TempDir tmp("pipe_permute");
    PipelineConfig c = small_config(tmp.path / "out", 41);
    c.synth.n_patients = 20;
    run_synth(c);
    run_label(c);
    const auto truth = read_labels_csv(c.out_dir / "labels" / "labels.csv");

    c.controls.permute_labels = true;
    run_split(c);  // split consumes the permuted view; labels.csv itself is unchanged
    const auto after = read_labels_csv(c.out_dir / "labels" / "labels.csv");
    REQUIRE(truth.size() == after.size());
    for (std::size_t i = 0; i < truth.size(); ++i) CHECK(truth[i].label_5y == after[i].label_5y);
}
