#include "doctest.h"

#include <fstream>

#include "oracles.hpp"
#include "radmort/metrics.hpp"
#include "radmort/rng.hpp"
#include "test_helpers.hpp"

using namespace radmort;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> values) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double v : values) out[i++] = v;
    return out;
}

}  // namespace

TEST_CASE("auroc worked examples") {
    CHECK(auroc(vec({0.1, 0.2, 0.8, 0.9}), vec({0, 0, 1, 1})) == 1.0);
    CHECK(auroc(vec({0.5, 0.5, 0.5, 0.5}), vec({0, 1, 0, 1})) == 0.5);
    // Pairs: 0.9 > 0.8 correct, 0.3 < 0.8 wrong.
    CHECK(auroc(vec({0.9, 0.8, 0.3}), vec({1, 0, 1})) == 0.5);
    CHECK_THROWS_AS(auroc(vec({0.1, 0.9}), vec({1, 1})), ValidationError);
}

TEST_CASE("rank-based auroc equals brute-force pair counting with ties") {
    auto eng = make_engine(81);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = static_cast<int>(uniform_int(eng, 2, 500));
        std::vector<double> scores(static_cast<std::size_t>(n));
        std::vector<int> labels(static_cast<std::size_t>(n));
        // Coarse score grid forces heavy ties.
        const int grid = static_cast<int>(uniform_int(eng, 2, 20));
        bool has_pos = false, has_neg = false;
        for (int i = 0; i < n; ++i) {
            scores[static_cast<std::size_t>(i)] =
                static_cast<double>(uniform_index(eng, static_cast<std::uint64_t>(grid))) / grid;
            labels[static_cast<std::size_t>(i)] = uniform01(eng) < 0.4 ? 1 : 0;
            (labels[static_cast<std::size_t>(i)] ? has_pos : has_neg) = true;
        }
        if (!has_pos) labels[0] = 1;
        if (!has_neg) labels[1 % n] = 0;

        Eigen::VectorXd s(n), y(n);
        for (int i = 0; i < n; ++i) {
            s[i] = scores[static_cast<std::size_t>(i)];
            y[i] = labels[static_cast<std::size_t>(i)];
        }
        CHECK(auroc(s, y) == oracle::auroc_pairs(scores, labels));
    }
}

TEST_CASE("auroc invariances") {
    auto eng = make_engine(82);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = static_cast<int>(uniform_int(eng, 4, 200));
        Eigen::VectorXd s(n), y(n);
        bool has_pos = false, has_neg = false;
        for (int i = 0; i < n; ++i) {
            s[i] = normal01(eng);
            y[i] = uniform01(eng) < 0.5 ? 1.0 : 0.0;
            (y[i] > 0.5 ? has_pos : has_neg) = true;
        }
        if (!has_pos) y[0] = 1.0;
        if (!has_neg) y[1] = 0.0;

        const double base = auroc(s, y);
        // Strictly increasing transform leaves AUROC unchanged.
        Eigen::VectorXd transformed = s;
        for (int i = 0; i < n; ++i) transformed[i] = std::exp(2.0 * s[i]) + 3.0;
        CHECK(auroc(transformed, y) == doctest::Approx(base).epsilon(1e-12));
        // Complement symmetry.
        Eigen::VectorXd flipped = Eigen::VectorXd::Ones(n) - y;
        CHECK(auroc(s, y) + auroc(s, flipped) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("confusion metrics worked examples") {
    SUBCASE("perfect classifier") {
        const auto m = confusion_metrics(vec({0.9, 0.8, 0.1, 0.2}), vec({1, 1, 0, 0}), 0.5);
        CHECK(m.sensitivity == 1.0);
        CHECK(m.specificity == 1.0);
        CHECK(m.precision == 1.0);
        CHECK(m.f1 == 1.0);
    }
    SUBCASE("always-positive classifier") {
        const auto m = confusion_metrics(vec({0.9, 0.9, 0.9, 0.9}), vec({1, 0, 0, 0}), 0.5);
        CHECK(m.sensitivity == 1.0);
        CHECK(m.specificity == 0.0);
        CHECK(m.precision == doctest::Approx(0.25));  // prevalence
    }
    SUBCASE("hand-counted mixed case") {
        const auto m = confusion_metrics(vec({0.6, 0.4, 0.7, 0.2}), vec({1, 1, 0, 0}), 0.5);
        CHECK(m.counts.tp == 1);
        CHECK(m.counts.fn == 1);
        CHECK(m.counts.fp == 1);
        CHECK(m.counts.tn == 1);
        CHECK(m.sensitivity == 0.5);
        CHECK(m.specificity == 0.5);
        CHECK(m.precision == 0.5);
        CHECK(m.f1 == 0.5);
    }
    SUBCASE("always-negative classifier has zero precision by convention") {
        const auto m = confusion_metrics(vec({0.1, 0.2, 0.3}), vec({1, 0, 0}), 0.5);
        CHECK(m.precision == 0.0);
        CHECK(m.f1 == 0.0);
    }
}

TEST_CASE("confusion counts partition the sample") {
    auto eng = make_engine(83);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = static_cast<int>(uniform_int(eng, 2, 300));
        Eigen::VectorXd s(n), y(n);
        for (int i = 0; i < n; ++i) {
            s[i] = uniform01(eng);
            y[i] = uniform01(eng) < 0.3 ? 1.0 : 0.0;
        }
        y[0] = 1.0;
        if (n > 1) y[1] = 0.0;
        const auto m = confusion_metrics(s, y, uniform01(eng));
        CHECK(m.counts.total() == n);
        // Metric identities against the counts.
        CHECK(m.sensitivity ==
              doctest::Approx(static_cast<double>(m.counts.tp) / (m.counts.tp + m.counts.fn)));
        CHECK(m.specificity ==
              doctest::Approx(static_cast<double>(m.counts.tn) / (m.counts.tn + m.counts.fp)));
    }
}

TEST_CASE("report assembly pools folds and aggregates") {
    auto eng = make_engine(84);
    std::vector<Eigen::VectorXd> scores, labels;
    Eigen::Index total = 0;
    for (int f = 0; f < 5; ++f) {
        const int n = 40;
        Eigen::VectorXd s(n), y(n);
        for (int i = 0; i < n; ++i) {
            y[i] = i % 2 == 0 ? 1.0 : 0.0;
            s[i] = y[i] * 0.6 + 0.2 * uniform01(eng);
        }
        scores.push_back(s);
        labels.push_back(y);
        total += n;
    }
    const EvalReport report = assemble_report("3y", "logreg", scores, labels);
    CHECK(report.task == "3y");
    CHECK(report.folds.size() == 5);
    CHECK(report.pooled.at_threshold.counts.total() == total);
    CHECK(report.pooled.auroc > 0.9);
    CHECK(report.fold_mean[0] == doctest::Approx([&] {
              double acc = 0;
              for (const auto& b : report.folds) acc += b.auroc;
              return acc / 5.0;
          }()));
}

TEST_CASE("independent scores and labels sit at chance level for large n") {
    auto eng = make_engine(86);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 500;
        Eigen::VectorXd s(n), y(n);
        for (int i = 0; i < n; ++i) {
            s[i] = uniform01(eng);
            y[i] = uniform01(eng) < 0.5 ? 1.0 : 0.0;
        }
        y[0] = 1.0;
        y[1] = 0.0;
        const double a = auroc(s, y);
        CHECK(a >= 0.40);
        CHECK(a <= 0.60);
    }
}

TEST_CASE("roc staircase endpoints and monotonicity") {
    auto eng = make_engine(85);
    const int n = 120;
    Eigen::VectorXd s(n), y(n);
    for (int i = 0; i < n; ++i) {
        y[i] = uniform01(eng) < 0.4 ? 1.0 : 0.0;
        s[i] = y[i] * 0.4 + uniform01(eng) * 0.6;
    }
    y[0] = 1.0;
    y[1] = 0.0;
    const auto points = roc_points(s, y);
    REQUIRE(points.size() >= 2);
    CHECK(points.front().fpr == 0.0);
    CHECK(points.front().tpr == 0.0);
    CHECK(points.back().fpr == 1.0);
    CHECK(points.back().tpr == 1.0);
    for (std::size_t i = 1; i < points.size(); ++i) {
        CHECK(points[i].fpr >= points[i - 1].fpr);
        CHECK(points[i].tpr >= points[i - 1].tpr);
        CHECK(points[i].threshold < points[i - 1].threshold);
    }
}

TEST_CASE("roc csv is written with header") {
    testutil::TempDir tmp("roc");
    const auto points = roc_points(vec({0.9, 0.1, 0.5}), vec({1, 0, 0}));
    write_roc_csv(tmp.path / "roc.csv", points);
    std::ifstream in(tmp.path / "roc.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "threshold,fpr,tpr");
}
