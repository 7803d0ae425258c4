#include <cmath>

#include "radmort/models.hpp"

namespace radmort {

namespace {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

// log(1 + e^z) without overflow.
inline double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

void check_inputs(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    if (X.rows() != y.size()) throw ValidationError("logreg: X rows and y size differ");
    if (X.rows() == 0) throw ValidationError("logreg: empty training set");
    if (!X.allFinite() || !y.allFinite()) throw ValidationError("logreg: non-finite inputs");
}

}  // namespace

double logreg_loss(const LogRegModel& model, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                   const ClassWeights& weights) {
    check_inputs(X, y);
    const Eigen::VectorXd z = (X * model.weights).array() + model.intercept;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i)
        acc += weights.of(y[i]) * (softplus(z[i]) - y[i] * z[i]);  // == -y log p - (1-y) log(1-p)
    return acc / static_cast<double>(y.size()) + model.config.l2 * model.weights.squaredNorm();
}

void logreg_gradient(const LogRegModel& model, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const ClassWeights& weights, Eigen::VectorXd& grad_w, double& grad_b) {
    check_inputs(X, y);
    const Eigen::VectorXd z = (X * model.weights).array() + model.intercept;
    Eigen::VectorXd residual(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i)
        residual[i] = weights.of(y[i]) * (sigmoid(z[i]) - y[i]);
    const double inv_n = 1.0 / static_cast<double>(y.size());
    grad_w = inv_n * (X.transpose() * residual) + 2.0 * model.config.l2 * model.weights;
    grad_b = inv_n * residual.sum();
}

LogRegModel train_logreg(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const ClassWeights& weights,
                         const LogRegConfig& config) {
    check_inputs(X, y);
    if (!(config.learning_rate > 0.0)) throw ValidationError("train_logreg: learning_rate must be positive");
    if (config.max_iterations < 1) throw ValidationError("train_logreg: max_iterations must be at least 1");
    if (config.l2 < 0.0) throw ValidationError("train_logreg: l2 must be non-negative");

    LogRegModel model;
    model.weights = Eigen::VectorXd::Zero(X.cols());
    model.intercept = 0.0;
    model.config = config;

    Eigen::VectorXd grad_w(X.cols());
    double grad_b = 0.0;
    for (int it = 0; it < config.max_iterations; ++it) {
        logreg_gradient(model, X, y, weights, grad_w, grad_b);
        const double gnorm = std::sqrt(grad_w.squaredNorm() + grad_b * grad_b);
        if (!std::isfinite(gnorm))
            throw RuntimeFailure("train_logreg: non-finite gradient (check feature standardization)");
        if (gnorm <= config.gradient_tol) break;
        model.weights -= config.learning_rate * grad_w;
        model.intercept -= config.learning_rate * grad_b;
    }
    if (!model.weights.allFinite() || !std::isfinite(model.intercept))
        throw RuntimeFailure("train_logreg: parameters diverged (check feature standardization)");
    return model;
}

Eigen::VectorXd predict_proba(const LogRegModel& model, const Eigen::MatrixXd& X) {
    if (X.cols() != model.weights.size())
        throw ValidationError("predict_proba(logreg): expected " + std::to_string(model.weights.size()) +
                              " features, got " + std::to_string(X.cols()));
    Eigen::VectorXd p = (X * model.weights).array() + model.intercept;
    for (Eigen::Index i = 0; i < p.size(); ++i)
        p[i] = std::min(1.0 - 1e-12, std::max(1e-12, sigmoid(p[i])));
    return p;
}

}  // namespace radmort
