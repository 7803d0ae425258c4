#include <cmath>

#include "radmort/models.hpp"

namespace radmort {

Standardizer fit_standardizer(const Eigen::MatrixXd& X) {
    if (X.rows() == 0) throw ValidationError("fit_standardizer: empty matrix");
    Standardizer s;
    s.mean = X.colwise().mean();
    const Eigen::MatrixXd centered = X.rowwise() - s.mean.transpose();
    s.std = (centered.array().square().colwise().sum() / static_cast<double>(X.rows())).sqrt();
    for (Eigen::Index j = 0; j < s.std.size(); ++j)
        if (s.std[j] < 1e-12) s.std[j] = 1.0;  // constant feature
    return s;
}

Eigen::MatrixXd Standardizer::transform(const Eigen::MatrixXd& X) const {
    if (X.cols() != mean.size())
        throw ValidationError("Standardizer: expected " + std::to_string(mean.size()) + " features, got " +
                              std::to_string(X.cols()));
    return (X.rowwise() - mean.transpose()).array().rowwise() / std.transpose().array();
}

ClassWeights compute_class_weights(const Eigen::VectorXd& y) {
    const auto n = static_cast<std::int64_t>(y.size());
    std::int64_t n_pos = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) n_pos += y[i] > 0.5;
    const std::int64_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw ValidationError("compute_class_weights: both classes must be present");
    return {static_cast<double>(n) / (2.0 * static_cast<double>(n_neg)),
            static_cast<double>(n) / (2.0 * static_cast<double>(n_pos))};
}

double weighted_cross_entropy(const Eigen::VectorXd& proba, const Eigen::VectorXd& y,
                              const ClassWeights& weights) {
    if (proba.size() != y.size()) throw ValidationError("weighted_cross_entropy: size mismatch");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double p = std::min(1.0 - 1e-12, std::max(1e-12, proba[i]));
        const double ce = y[i] > 0.5 ? -std::log(p) : -std::log(1.0 - p);
        acc += weights.of(y[i]) * ce;
    }
    return acc / static_cast<double>(y.size());
}

}  // namespace radmort
