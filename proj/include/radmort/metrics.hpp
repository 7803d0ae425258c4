#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace radmort {

// Mann-Whitney AUROC over all (positive, negative) pairs, ties counting
// one half, computed from sorted average ranks in O(n log n). Throws
// ValidationError when only one class is present or a score is non-finite.
double auroc(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels);

struct ConfusionCounts {
    std::int64_t tp = 0, fp = 0, tn = 0, fn = 0;
    std::int64_t total() const { return tp + fp + tn + fn; }
};

struct ThresholdMetrics {
    double threshold = 0.5;
    ConfusionCounts counts;
    double sensitivity = 0.0;
    double specificity = 0.0;
    double precision = 0.0;
    double f1 = 0.0;
};

// Predict positive iff score >= threshold. precision is 0 when no positive
// predictions exist; F1 is 0 when precision and sensitivity are both 0.
ThresholdMetrics confusion_metrics(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels,
                                   double threshold = 0.5);

struct MetricBundle {
    double auroc = 0.0;
    ThresholdMetrics at_threshold;
};

MetricBundle compute_metrics(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels,
                             double threshold = 0.5);

// Full evaluation report for one (task, model): metrics on the pooled
// out-of-fold test predictions plus per-fold values with mean and sd.
struct EvalReport {
    std::string task;   // "1y", "3y", "5y"
    std::string model;  // "logreg", "gbt"
    double threshold = 0.5;
    MetricBundle pooled;
    std::vector<MetricBundle> folds;
    // Per-fold mean +- sd of [auroc, sensitivity, specificity, precision, f1].
    Eigen::Matrix<double, 5, 1> fold_mean = Eigen::Matrix<double, 5, 1>::Zero();
    Eigen::Matrix<double, 5, 1> fold_sd = Eigen::Matrix<double, 5, 1>::Zero();
};

EvalReport assemble_report(const std::string& task, const std::string& model,
                           const std::vector<Eigen::VectorXd>& fold_scores,
                           const std::vector<Eigen::VectorXd>& fold_labels, double threshold = 0.5);

void write_report_json(const std::filesystem::path& path, const std::vector<EvalReport>& reports);

// ROC staircase: one row per distinct score threshold (descending), columns
// threshold,fpr,tpr, starting at the (0,0) point with threshold above every
// score.
struct RocPoint {
    double threshold = 0.0;
    double fpr = 0.0;
    double tpr = 0.0;
};

std::vector<RocPoint> roc_points(const Eigen::VectorXd& scores, const Eigen::VectorXd& labels);
void write_roc_csv(const std::filesystem::path& path, const std::vector<RocPoint>& points);

}  // namespace radmort
