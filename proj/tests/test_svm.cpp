#include "doctest.h"

#include <random>

#include "fakecatcher/svm.hpp"

#include "oracles.hpp"

using namespace fc;

namespace {

FeatureMatrix random_rows(std::size_t n, std::size_t d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    FeatureMatrix x(n, std::vector<double>(d));
    for (auto& row : x) {
        for (double& v : row) v = dist(rng);
    }
    return x;
}

}  // namespace

TEST_SUITE("svm") {

TEST_CASE("two separated points classify perfectly") {
    const FeatureMatrix x = {{-2.0}, {2.0}};
    const std::vector<int> y = {-1, 1};
    const auto model = train_svc(x, y, {});
    CHECK(predict_label(model, {-2.0}) == -1);
    CHECK(predict_label(model, {2.0}) == 1);
    CHECK(model.train_kkt <= 1e-3);
}

TEST_CASE("XOR reaches 100% training accuracy with the RBF kernel") {
    const FeatureMatrix x = {{0.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}, {1.0, 0.0}};
    const std::vector<int> y = {-1, -1, 1, 1};
    SvmParams p;
    p.C = 10.0;
    p.gamma = 1.0;
    const auto model = train_svc(x, y, p);
    for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(predict_label(model, x[i]) == y[i]);
    }
    CHECK(model.train_kkt <= 1e-3);
}

TEST_CASE("capacity: random labels memorized with a large C") {
    const auto x = random_rows(50, 126, 7);
    std::mt19937_64 rng(8);
    std::vector<int> y(50);
    for (int& v : y) v = (rng() & 1) ? 1 : -1;
    // ensure both classes appear
    y[0] = 1;
    y[1] = -1;
    SvmParams p;
    p.C = 1e6;
    p.gamma = 0.5;
    const auto model = train_svc(x, y, p);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (predict_label(model, x[i]) == y[i]) ++correct;
    }
    CHECK(correct >= 48);  // >= 95%
    CHECK(model.train_kkt <= 1e-3);
}

TEST_CASE("single-class input is rejected") {
    const FeatureMatrix x = {{0.0}, {1.0}};
    CHECK_THROWS_AS(train_svc(x, {1, 1}, {}), ParamError);
}

TEST_CASE("standardization round-trip on the training set") {
    const auto x = random_rows(40, 5, 11);
    std::vector<int> y(40);
    for (std::size_t i = 0; i < 40; ++i) y[i] = i % 2 == 0 ? 1 : -1;
    const auto model = train_svc(x, y, {});
    const std::size_t d = 5;
    for (std::size_t j = 0; j < d; ++j) {
        double m = 0.0, ss = 0.0;
        for (const auto& row : x) {
            const double v = (row[j] - model.feat_mean[j]) / model.feat_std[j];
            m += v;
            ss += v * v;
        }
        m /= 40.0;
        const double sd = std::sqrt(ss / 40.0 - m * m);
        CHECK(std::abs(m) < 1e-9);
        CHECK(std::abs(sd - 1.0) < 1e-6);
    }
}

TEST_CASE("decision values match a projected-gradient QP oracle on small instances") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        const std::size_t n = 16, d = 3;
        auto x = random_rows(n, d, seed);
        std::vector<int> y(n);
        std::mt19937_64 rng(seed + 100);
        for (std::size_t i = 0; i < n; ++i) y[i] = (rng() & 1) ? 1 : -1;
        y[0] = 1;
        y[1] = -1;

        SvmParams p;
        p.C = 5.0;
        p.gamma = 0.25;
        p.tol = 1e-6;  // tight so the comparison is meaningful
        const auto model = train_svc(x, y, p);

        // oracle solves the same dual on the standardized features
        FeatureMatrix xs(n);
        for (std::size_t i = 0; i < n; ++i) {
            xs[i].resize(d);
            for (std::size_t j = 0; j < d; ++j)
                xs[i][j] = (x[i][j] - model.feat_mean[j]) / model.feat_std[j];
        }
        std::vector<std::vector<double>> q(n, std::vector<double>(n));
        std::vector<double> yv(n), cv(n, p.C), pv(n, -1.0);
        for (std::size_t i = 0; i < n; ++i) yv[i] = y[i];
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                double sq = 0.0;
                for (std::size_t k = 0; k < d; ++k) {
                    const double diff = xs[i][k] - xs[j][k];
                    sq += diff * diff;
                }
                q[i][j] = yv[i] * yv[j] * std::exp(-p.gamma * sq);
            }
        }
        const auto alpha = oracle::qp_box_hyperplane(q, pv, yv, cv, 60000, 5e-3);

        // oracle bias from the free support vectors
        double bias_acc = 0.0;
        int bias_cnt = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (alpha[i] > 1e-4 && alpha[i] < p.C - 1e-4) {
                double f = 0.0;
                for (std::size_t j = 0; j < n; ++j)
                    f += alpha[j] * yv[j] * q[i][j] / (yv[i] * yv[j]);
                bias_acc += yv[i] - f;
                ++bias_cnt;
            }
        }
        REQUIRE(bias_cnt > 0);
        const double bias = bias_acc / bias_cnt;

        for (std::size_t t = 0; t < n; ++t) {
            double oracle_dec = bias;
            for (std::size_t j = 0; j < n; ++j)
                oracle_dec += alpha[j] * yv[j] * (q[t][j] / (yv[t] * yv[j]));
            CHECK(std::abs(decision_value(model, x[t]) - oracle_dec) < 1e-3);
        }
    }
}

TEST_CASE("svr: constant targets and clamped probabilities") {
    const auto x = random_rows(20, 4, 21);
    const std::vector<double> ones(20, 1.0);
    const auto model = train_svr(x, ones, {});
    for (std::size_t i = 0; i < 20; ++i) {
        CHECK(predict_probability(model, x[i]) == doctest::Approx(1.0).epsilon(0.11));
    }
    // probabilities stay in [0,1] even far from the data
    std::vector<double> far(4, 50.0);
    const double p = predict_probability(model, far);
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
}

TEST_CASE("svr: orderings agree with svc decision values on a separable set") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> noise(0.0, 0.3);
    FeatureMatrix x;
    std::vector<int> ylab;
    std::vector<double> y01;
    for (int i = 0; i < 30; ++i) {
        const double cls = i % 2 == 0 ? 1.0 : -1.0;
        x.push_back({cls * 2.0 + noise(rng), cls * 2.0 + noise(rng)});
        ylab.push_back(static_cast<int>(cls));
        y01.push_back(cls > 0 ? 1.0 : 0.0);
    }
    const auto svc = train_svc(x, ylab, {});
    const auto svr = train_svr(x, y01, {});
    CHECK(svr.train_kkt <= 1e-3);
    // same pairwise ordering of scores
    std::size_t agree = 0, total = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            const double da = decision_value(svc, x[i]) - decision_value(svc, x[j]);
            const double db = predict_probability(svr, x[i]) - predict_probability(svr, x[j]);
            if (std::abs(da) < 1e-9 || std::abs(db) < 1e-9) continue;
            ++total;
            if ((da > 0) == (db > 0)) ++agree;
        }
    }
    CHECK(static_cast<double>(agree) / static_cast<double>(total) > 0.9);
}

TEST_CASE("prediction is invariant to training-row permutation") {
    const auto x = random_rows(24, 6, 41);
    std::vector<int> y(24);
    for (std::size_t i = 0; i < 24; ++i) y[i] = i % 2 == 0 ? 1 : -1;
    const auto m1 = train_svc(x, y, {});

    std::vector<std::size_t> perm(24);
    std::iota(perm.begin(), perm.end(), 0UL);
    std::mt19937_64 rng(5);
    std::shuffle(perm.begin(), perm.end(), rng);
    FeatureMatrix xp;
    std::vector<int> yp;
    for (std::size_t i : perm) {
        xp.push_back(x[i]);
        yp.push_back(y[i]);
    }
    const auto m2 = train_svc(xp, yp, {});
    for (int t = 0; t < 10; ++t) {
        const auto probe = random_rows(1, 6, 600 + static_cast<std::uint64_t>(t))[0];
        CHECK(std::abs(decision_value(m1, probe) - decision_value(m2, probe)) < 1e-6);
    }
}

TEST_CASE("grid search: degenerate grid, separable data, ordering") {
    std::mt19937_64 rng(51);
    std::normal_distribution<double> noise(0.0, 0.2);
    FeatureMatrix x;
    std::vector<int> y;
    for (int i = 0; i < 40; ++i) {
        const double cls = i % 2 == 0 ? 1.0 : -1.0;
        x.push_back({cls * 3.0 + noise(rng)});
        y.push_back(static_cast<int>(cls));
    }
    const auto single = grid_search(x, y, {1.0}, {0.5}, 4, 9);
    CHECK(single.best_c == 1.0);
    CHECK(single.best_gamma == 0.5);

    const auto grid = grid_search(x, y, {0.1, 1.0, 10.0}, {0.05, 0.5}, 4, 9);
    CHECK(grid.best_accuracy == doctest::Approx(1.0));
    double worst = 1.0;
    for (const auto& cell : grid.cells) worst = std::min(worst, cell[2]);
    CHECK(grid.best_accuracy >= worst);
}

TEST_CASE("model serialization round-trips") {
    const auto x = random_rows(16, 3, 61);
    std::vector<int> y(16);
    for (std::size_t i = 0; i < 16; ++i) y[i] = i % 2 == 0 ? 1 : -1;
    auto model = train_svc(x, y, {});
    model.prob_threshold = 0.42;
    const auto path = std::filesystem::temp_directory_path() / "fc_svm_roundtrip.json";
    model.save(path);
    const auto loaded = SvmModel::load(path);
    CHECK(loaded.prob_threshold == 0.42);
    for (int t = 0; t < 5; ++t) {
        const auto probe = random_rows(1, 3, 700 + static_cast<std::uint64_t>(t))[0];
        CHECK(decision_value(model, probe) == doctest::Approx(decision_value(loaded, probe)));
    }
    std::filesystem::remove(path);
}

}  // TEST_SUITE
