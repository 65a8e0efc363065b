#pragma once

#include <cstdint>
#include <filesystem>

#include "fakecatcher/common.hpp"

namespace fc {

using FeatureMatrix = std::vector<std::vector<double>>;

struct SvmParams {
    double C = 10.0;
    double gamma = 1.0 / 126.0;
    double epsilon = 0.1;       // SVR tube
    double tol = 1e-3;          // KKT stopping tolerance
    long max_iter = 2'000'000;  // working-set selections
    bool balance_classes = false;  // C_k = C * n / (2 * n_k)
};

struct SvmModel {
    enum class Mode { classify, regress };
    Mode mode = Mode::classify;
    double gamma = 1.0;
    double C = 1.0;
    double epsilon = 0.1;
    double bias = 0.0;
    FeatureMatrix support_vectors;   // already standardized
    std::vector<double> dual_coef;   // y_i*alpha_i (SVC) or beta_i (SVR)
    std::vector<double> feat_mean;   // train-time standardization
    std::vector<double> feat_std;
    double prob_threshold = 0.5;  // expectation of train-segment probabilities
    double train_kkt = 0.0;       // residual at convergence
    long train_iters = 0;

    void save(const std::filesystem::path& path) const;
    static SvmModel load(const std::filesystem::path& path);
};

// y: +1 (fake) / -1 (authentic). Features are standardized internally with
// train-set statistics kept in the model.
SvmModel train_svc(const FeatureMatrix& x, const std::vector<int>& y, const SvmParams& params = {});

// epsilon-SVR on 0/1 authenticity targets; predictions clamp to [0,1].
SvmModel train_svr(const FeatureMatrix& x, const std::vector<double>& y01,
                   const SvmParams& params = {});

double decision_value(const SvmModel& model, const std::vector<double>& x);
int predict_label(const SvmModel& model, const std::vector<double>& x);  // +1 fake / -1 authentic
double predict_probability(const SvmModel& model, const std::vector<double>& x);  // p_fake

struct GridSearchResult {
    double best_c = 0.0;
    double best_gamma = 0.0;
    double best_accuracy = 0.0;
    // one row per (C, gamma) cell: {C, gamma, mean accuracy}
    std::vector<std::array<double, 3>> cells;
};

GridSearchResult grid_search(const FeatureMatrix& x, const std::vector<int>& y,
                             const std::vector<double>& c_grid,
                             const std::vector<double>& gamma_grid, int k_folds,
                             std::uint64_t seed, const SvmParams& base = {});

}  // namespace fc
