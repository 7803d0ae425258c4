#include <algorithm>
#include <cmath>
#include <numeric>

#include "radmort/models.hpp"
#include "radmort/rng.hpp"

namespace radmort {

namespace {

constexpr double kHessianEps = 1e-12;
constexpr double kMaxLeafValue = 20.0;  // log-odds step cap; sigmoid saturates well before this
constexpr double kMinGain = 1e-12;

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

inline double leaf_value(double g_sum, double h_sum) {
    const double v = -g_sum / (h_sum + kHessianEps);
    return std::clamp(v, -kMaxLeafValue, kMaxLeafValue);
}

struct TreeBuilder {
    const Eigen::MatrixXd& X;
    const Eigen::VectorXd& grad;
    const Eigen::VectorXd& hess;
    const GbtConfig& config;
    GbtTree tree;

    int build(std::vector<int>& rows, int depth) {
        double g_sum = 0.0, h_sum = 0.0;
        for (int r : rows) {
            g_sum += grad[r];
            h_sum += hess[r];
        }

        const int node = add_node();
        if (depth >= config.max_depth || static_cast<int>(rows.size()) < 2 * config.min_leaf) {
            tree.value[static_cast<std::size_t>(node)] = leaf_value(g_sum, h_sum);
            return node;
        }

        // Exact greedy split: best gain over every feature and every
        // boundary between consecutive distinct sorted values.
        const double parent_score = g_sum * g_sum / (h_sum + kHessianEps);
        double best_gain = kMinGain;
        int best_feature = -1;
        double best_threshold = 0.0;
        std::vector<int> sorted = rows;
        for (int f = 0; f < static_cast<int>(X.cols()); ++f) {
            std::sort(sorted.begin(), sorted.end(), [&](int a, int b) {
                if (X(a, f) != X(b, f)) return X(a, f) < X(b, f);
                return a < b;
            });
            double gl = 0.0, hl = 0.0;
            for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
                gl += grad[sorted[i]];
                hl += hess[sorted[i]];
                const double a = X(sorted[i], f), b = X(sorted[i + 1], f);
                if (a == b) continue;
                const auto left_n = static_cast<int>(i + 1);
                const auto right_n = static_cast<int>(sorted.size()) - left_n;
                if (left_n < config.min_leaf || right_n < config.min_leaf) continue;
                const double gr = g_sum - gl, hr = h_sum - hl;
                const double gain = gl * gl / (hl + kHessianEps) + gr * gr / (hr + kHessianEps) - parent_score;
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = f;
                    best_threshold = 0.5 * (a + b);
                }
            }
        }
        if (best_feature < 0) {
            tree.value[static_cast<std::size_t>(node)] = leaf_value(g_sum, h_sum);
            return node;
        }

        std::vector<int> left_rows, right_rows;
        for (int r : rows)
            (X(r, best_feature) <= best_threshold ? left_rows : right_rows).push_back(r);
        rows.clear();
        rows.shrink_to_fit();

        tree.feature[static_cast<std::size_t>(node)] = best_feature;
        tree.threshold[static_cast<std::size_t>(node)] = best_threshold;
        tree.left[static_cast<std::size_t>(node)] = build(left_rows, depth + 1);
        tree.right[static_cast<std::size_t>(node)] = build(right_rows, depth + 1);
        return node;
    }

    int add_node() {
        tree.feature.push_back(-1);
        tree.threshold.push_back(0.0);
        tree.left.push_back(-1);
        tree.right.push_back(-1);
        tree.value.push_back(0.0);
        return static_cast<int>(tree.feature.size()) - 1;
    }
};

}  // namespace

double GbtTree::predict_row(const Eigen::Ref<const Eigen::RowVectorXd>& x) const {
    int node = 0;
    while (feature[static_cast<std::size_t>(node)] >= 0) {
        const int f = feature[static_cast<std::size_t>(node)];
        node = x[f] <= threshold[static_cast<std::size_t>(node)] ? left[static_cast<std::size_t>(node)]
                                                                 : right[static_cast<std::size_t>(node)];
    }
    return value[static_cast<std::size_t>(node)];
}

GbtModel train_gbt(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const ClassWeights& weights,
                   const GbtConfig& config) {
    if (X.rows() != y.size()) throw ValidationError("train_gbt: X rows and y size differ");
    if (X.rows() == 0) throw ValidationError("train_gbt: empty training set");
    if (config.n_trees < 1) throw ValidationError("train_gbt: n_trees must be at least 1");
    if (config.max_depth < 1) throw ValidationError("train_gbt: max_depth must be at least 1");
    if (!(config.bag_fraction > 0.0 && config.bag_fraction <= 1.0))
        throw ValidationError("train_gbt: bag_fraction must lie in (0, 1]");
    if (config.min_leaf < 1) throw ValidationError("train_gbt: min_leaf must be at least 1");
    if (!(config.learning_rate > 0.0)) throw ValidationError("train_gbt: learning_rate must be positive");

    const auto n = static_cast<int>(X.rows());
    GbtModel model;
    model.learning_rate = config.learning_rate;
    model.n_features = static_cast<int>(X.cols());
    model.config = config;

    double w_sum = 0.0, wy_sum = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        w_sum += weights.of(y[i]);
        wy_sum += weights.of(y[i]) * y[i];
    }
    const double prevalence = std::clamp(wy_sum / w_sum, 1e-6, 1.0 - 1e-6);
    model.base_score = std::log(prevalence / (1.0 - prevalence));

    Eigen::VectorXd scores = Eigen::VectorXd::Constant(n, model.base_score);
    Eigen::VectorXd grad(n), hess(n);

    std::vector<int> all_rows(static_cast<std::size_t>(n));
    std::iota(all_rows.begin(), all_rows.end(), 0);
    const auto bag_size = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::floor(config.bag_fraction * static_cast<double>(n))));

    for (int t = 0; t < config.n_trees; ++t) {
        for (int i = 0; i < n; ++i) {
            const double p = sigmoid(scores[i]);
            const double w = weights.of(y[i]);
            grad[i] = w * (p - y[i]);
            hess[i] = w * p * (1.0 - p);
        }

        std::vector<int> rows;
        if (bag_size >= static_cast<std::size_t>(n)) {
            rows = all_rows;  // no draw: the seed is irrelevant at bag_fraction 1
        } else {
            auto eng = make_engine(derive_seed(config.seed, static_cast<std::uint64_t>(t)));
            std::vector<int> pool = all_rows;
            rows.reserve(bag_size);
            for (std::size_t i = 0; i < bag_size; ++i) {
                const auto j = i + static_cast<std::size_t>(uniform_index(eng, pool.size() - i));
                std::swap(pool[i], pool[j]);
                rows.push_back(pool[i]);
            }
            std::sort(rows.begin(), rows.end());
        }

        TreeBuilder builder{X, grad, hess, config, GbtTree{}};
        builder.build(rows, 0);
        for (int i = 0; i < n; ++i)
            scores[i] += config.learning_rate * builder.tree.predict_row(X.row(i));
        model.trees.push_back(std::move(builder.tree));
    }
    return model;
}

Eigen::VectorXd gbt_staged_scores(const GbtModel& model, const Eigen::MatrixXd& X, std::size_t n_trees) {
    if (X.cols() != model.n_features)
        throw ValidationError("predict_proba(gbt): expected " + std::to_string(model.n_features) +
                              " features, got " + std::to_string(X.cols()));
    Eigen::VectorXd scores = Eigen::VectorXd::Constant(X.rows(), model.base_score);
    const std::size_t limit = std::min(n_trees, model.trees.size());
    for (std::size_t t = 0; t < limit; ++t)
        for (Eigen::Index i = 0; i < X.rows(); ++i)
            scores[i] += model.learning_rate * model.trees[t].predict_row(X.row(i));
    return scores;
}

Eigen::VectorXd predict_proba(const GbtModel& model, const Eigen::MatrixXd& X) {
    Eigen::VectorXd p = gbt_staged_scores(model, X, model.trees.size());
    for (Eigen::Index i = 0; i < p.size(); ++i)
        p[i] = std::min(1.0 - 1e-12, std::max(1e-12, sigmoid(p[i])));
    return p;
}

}  // namespace radmort
