#include "radmort/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "json.hpp"

#include "radmort/csv.hpp"
#include "radmort/errors.hpp"

namespace radmort {

namespace {

void check_scores_labels(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels) {
    if (scores.size() != labels.size()) throw ValidationError("metrics: scores and labels differ in length");
    if (scores.size() == 0) throw ValidationError("metrics: empty input");
    if (!scores.allFinite()) throw ValidationError("metrics: non-finite score");
}

std::pair<std::int64_t, std::int64_t> class_sizes(const Eigen::VectorXd& labels) {
    std::int64_t n_pos = 0;
    for (Eigen::Index i = 0; i < labels.size(); ++i) n_pos += labels[i] > 0.5;
    return {n_pos, labels.size() - n_pos};
}

}  // namespace

double auroc(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels) {
    check_scores_labels(scores, labels);
    const auto [n_pos, n_neg] = class_sizes(labels);
    if (n_pos == 0 || n_neg == 0)
        throw ValidationError("auroc: undefined, both classes must be present");

    const auto n = static_cast<std::size_t>(scores.size());
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[static_cast<Eigen::Index>(a)] < scores[static_cast<Eigen::Index>(b)]; });

    // Average ranks over tie groups; ranks are half-integers, summed exactly.
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n &&
               scores[static_cast<Eigen::Index>(order[j + 1])] == scores[static_cast<Eigen::Index>(order[i])])
            ++j;
        const double avg_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k)
            if (labels[static_cast<Eigen::Index>(order[k])] > 0.5) rank_sum_pos += avg_rank;
        i = j + 1;
    }
    const double np = static_cast<double>(n_pos);
    return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

ThresholdMetrics confusion_metrics(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels,
                                   double threshold) {
    check_scores_labels(scores, labels);
    const auto [n_pos, n_neg] = class_sizes(labels);
    if (n_pos == 0 || n_neg == 0)
        throw ValidationError("confusion_metrics: both classes must be present");

    ThresholdMetrics m;
    m.threshold = threshold;
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
        const bool predicted = scores[i] >= threshold;
        const bool actual = labels[i] > 0.5;
        if (predicted && actual) ++m.counts.tp;
        else if (predicted && !actual) ++m.counts.fp;
        else if (!predicted && actual) ++m.counts.fn;
        else ++m.counts.tn;
    }
    m.sensitivity = static_cast<double>(m.counts.tp) / static_cast<double>(m.counts.tp + m.counts.fn);
    m.specificity = static_cast<double>(m.counts.tn) / static_cast<double>(m.counts.tn + m.counts.fp);
    m.precision = (m.counts.tp + m.counts.fp) > 0
                      ? static_cast<double>(m.counts.tp) / static_cast<double>(m.counts.tp + m.counts.fp)
                      : 0.0;
    m.f1 = (m.precision + m.sensitivity) > 0.0
               ? 2.0 * m.precision * m.sensitivity / (m.precision + m.sensitivity)
               : 0.0;
    return m;
}

MetricBundle compute_metrics(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels, double threshold) {
    return {auroc(scores, labels), confusion_metrics(scores, labels, threshold)};
}

EvalReport assemble_report(const std::string& task, const std::string& model,
                           const std::vector<Eigen::VectorXd>& fold_scores,
                           const std::vector<Eigen::VectorXd>& fold_labels, double threshold) {
    if (fold_scores.empty() || fold_scores.size() != fold_labels.size())
        throw ValidationError("assemble_report: need one score vector per fold");

    EvalReport report;
    report.task = task;
    report.model = model;
    report.threshold = threshold;

    Eigen::Index total = 0;
    for (const auto& s : fold_scores) total += s.size();
    Eigen::VectorXd pooled_scores(total), pooled_labels(total);
    Eigen::Index offset = 0;
    for (std::size_t f = 0; f < fold_scores.size(); ++f) {
        pooled_scores.segment(offset, fold_scores[f].size()) = fold_scores[f];
        pooled_labels.segment(offset, fold_labels[f].size()) = fold_labels[f];
        offset += fold_scores[f].size();
    }
    report.pooled = compute_metrics(pooled_scores, pooled_labels, threshold);

    // Per-fold metrics are reported for folds whose test labels contain
    // both classes; single-class folds contribute to the pooled metrics
    // only (their fold-level AUROC is undefined).
    std::vector<Eigen::RowVectorXd> rows;
    for (std::size_t f = 0; f < fold_scores.size(); ++f) {
        bool has_pos = false, has_neg = false;
        for (Eigen::Index i = 0; i < fold_labels[f].size(); ++i)
            (fold_labels[f][i] > 0.5 ? has_pos : has_neg) = true;
        if (!has_pos || !has_neg) continue;
        const MetricBundle b = compute_metrics(fold_scores[f], fold_labels[f], threshold);
        report.folds.push_back(b);
        Eigen::RowVectorXd row(5);
        row << b.auroc, b.at_threshold.sensitivity, b.at_threshold.specificity, b.at_threshold.precision,
            b.at_threshold.f1;
        rows.push_back(row);
    }
    if (!rows.empty()) {
        Eigen::MatrixXd per_fold(static_cast<Eigen::Index>(rows.size()), 5);
        for (std::size_t f = 0; f < rows.size(); ++f) per_fold.row(static_cast<Eigen::Index>(f)) = rows[f];
        report.fold_mean = per_fold.colwise().mean();
        if (per_fold.rows() > 1) {
            const Eigen::MatrixXd centered = per_fold.rowwise() - report.fold_mean.transpose();
            report.fold_sd = (centered.array().square().colwise().sum() /
                              static_cast<double>(per_fold.rows() - 1)).sqrt();
        }
    }
    return report;
}

namespace {

using nlohmann::json;

json bundle_to_json(const MetricBundle& b) {
    json j;
    j["auroc"] = b.auroc;
    j["sensitivity"] = b.at_threshold.sensitivity;
    j["specificity"] = b.at_threshold.specificity;
    j["precision"] = b.at_threshold.precision;
    j["f1"] = b.at_threshold.f1;
    j["counts"] = {{"tp", b.at_threshold.counts.tp},
                   {"fp", b.at_threshold.counts.fp},
                   {"tn", b.at_threshold.counts.tn},
                   {"fn", b.at_threshold.counts.fn}};
    return j;
}

}  // namespace

void write_report_json(const std::filesystem::path& path, const std::vector<EvalReport>& reports) {
    static const char* metric_names[5] = {"auroc", "sensitivity", "specificity", "precision", "f1"};
    json out = json::array();
    for (const auto& r : reports) {
        json j;
        j["schema_version"] = 1;
        j["task"] = r.task;
        j["model"] = r.model;
        j["threshold"] = r.threshold;
        j["pooled"] = bundle_to_json(r.pooled);
        j["folds"] = json::array();
        for (const auto& f : r.folds) j["folds"].push_back(bundle_to_json(f));
        for (int k = 0; k < 5; ++k) {
            j["fold_mean"][metric_names[k]] = r.fold_mean[k];
            j["fold_sd"][metric_names[k]] = r.fold_sd[k];
        }
        out.push_back(std::move(j));
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw RuntimeFailure("cannot write " + path.string());
    file << out.dump(2) << '\n';
}

std::vector<RocPoint> roc_points(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels) {
    check_scores_labels(scores, labels);
    const auto [n_pos, n_neg] = class_sizes(labels);
    if (n_pos == 0 || n_neg == 0) throw ValidationError("roc_points: both classes must be present");

    std::vector<std::pair<double, bool>> pairs;
    pairs.reserve(static_cast<std::size_t>(scores.size()));
    for (Eigen::Index i = 0; i < scores.size(); ++i) pairs.emplace_back(scores[i], labels[i] > 0.5);
    std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

    std::vector<RocPoint> points;
    points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});
    std::int64_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < pairs.size()) {
        const double s = pairs[i].first;
        while (i < pairs.size() && pairs[i].first == s) {
            if (pairs[i].second) ++tp;
            else ++fp;
            ++i;
        }
        points.push_back({s, static_cast<double>(fp) / static_cast<double>(n_neg),
                          static_cast<double>(tp) / static_cast<double>(n_pos)});
    }
    return points;
}

void write_roc_csv(const std::filesystem::path& path, const std::vector<RocPoint>& points) {
    CsvTable csv;
    csv.header = {"threshold", "fpr", "tpr"};
    for (const auto& p : points)
        csv.rows.push_back({std::isinf(p.threshold) ? "inf" : format_double(p.threshold),
                            format_double(p.fpr), format_double(p.tpr)});
    write_csv(path, csv);
}

}  // namespace radmort
