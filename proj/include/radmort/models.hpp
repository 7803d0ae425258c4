#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

#include "radmort/errors.hpp"

namespace radmort {

// Per-feature affine standardization fitted on training data only. Features
// with standard deviation below 1e-12 keep std 1 so constants map to 0.
struct Standardizer {
    Eigen::VectorXd mean;
    Eigen::VectorXd std;

    Eigen::MatrixXd transform(const Eigen::MatrixXd& X) const;
};

Standardizer fit_standardizer(const Eigen::MatrixXd& X);

// Inverse-frequency class weights: w_c = N / (2 * n_c).
struct ClassWeights {
    double w_neg = 1.0;
    double w_pos = 1.0;

    double of(double y) const { return y > 0.5 ? w_pos : w_neg; }
    static ClassWeights unit() { return {1.0, 1.0}; }
};

ClassWeights compute_class_weights(const Eigen::VectorXd& y);

struct LogRegConfig {
    double learning_rate = 0.05;
    int max_iterations = 2000;
    double l2 = 1e-4;          // lambda in lambda * ||w||^2 (intercept unpenalized)
    double gradient_tol = 1e-7;
};

struct LogRegModel {
    Eigen::VectorXd weights;
    double intercept = 0.0;
    LogRegConfig config;
};

// Mean weighted cross-entropy plus the L2 term; p_i = sigmoid(w.x_i + b).
double logreg_loss(const LogRegModel& model, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                   const ClassWeights& weights);

// Analytic gradient of logreg_loss with respect to (weights, intercept).
void logreg_gradient(const LogRegModel& model, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     const ClassWeights& weights, Eigen::VectorXd& grad_w, double& grad_b);

// Deterministic full-batch gradient descent with a fixed step, stopping on
// the gradient-norm tolerance or the iteration budget. Expects standardized
// features.
LogRegModel train_logreg(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const ClassWeights& weights,
                         const LogRegConfig& config);

Eigen::VectorXd predict_proba(const LogRegModel& model, const Eigen::MatrixXd& X);

struct GbtConfig {
    int n_trees = 200;
    int max_depth = 3;
    double learning_rate = 0.1;
    double bag_fraction = 1.0;
    int min_leaf = 5;
    std::uint64_t seed = 0;
};

// Flat node arrays; node 0 is the root. Leaves have feature == -1 and carry
// the additive log-odds value.
struct GbtTree {
    std::vector<int> feature;
    std::vector<double> threshold;
    std::vector<int> left;
    std::vector<int> right;
    std::vector<double> value;

    double predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const;
};

struct GbtModel {
    double base_score = 0.0;  // log-odds of the weighted training prevalence
    double learning_rate = 0.1;
    int n_features = 0;
    std::vector<GbtTree> trees;
    GbtConfig config;
};

// Stagewise boosting of depth-limited regression trees on the gradient of
// the weighted logistic loss, with exact greedy threshold splits and
// second-order leaf values. bag_fraction < 1 samples rows per tree from the
// model seed; bag_fraction == 1 uses every row and draws nothing.
GbtModel train_gbt(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const ClassWeights& weights,
                   const GbtConfig& config);

Eigen::VectorXd predict_proba(const GbtModel& model, const Eigen::MatrixXd& X);

// Raw additive scores (log-odds) after the first `n_trees` stages.
Eigen::VectorXd gbt_staged_scores(const GbtModel& model, const Eigen::MatrixXd& X, std::size_t n_trees);

// Mean weighted cross-entropy of probabilities against labels.
double weighted_cross_entropy(const Eigen::VectorXd& proba, const Eigen::VectorXd& y,
                              const ClassWeights& weights);

}  // namespace radmort
