#include "fakecatcher/svm.hpp"

#include <fstream>
#include <numeric>
#include <random>

#include "fakecatcher/kernels.hpp"

#include "json.hpp"

namespace fc {

namespace {

struct Standardizer {
    std::vector<double> mean;
    std::vector<double> stdev;

    static Standardizer fit(const FeatureMatrix& x) {
        const std::size_t n = x.size();
        const std::size_t d = x.front().size();
        Standardizer s;
        s.mean.assign(d, 0.0);
        s.stdev.assign(d, 0.0);
        for (const auto& row : x) {
            for (std::size_t j = 0; j < d; ++j) s.mean[j] += row[j];
        }
        for (std::size_t j = 0; j < d; ++j) s.mean[j] /= static_cast<double>(n);
        for (const auto& row : x) {
            for (std::size_t j = 0; j < d; ++j) {
                const double c = row[j] - s.mean[j];
                s.stdev[j] += c * c;
            }
        }
        for (std::size_t j = 0; j < d; ++j) {
            s.stdev[j] = std::sqrt(s.stdev[j] / static_cast<double>(n));
            if (s.stdev[j] < 1e-12) s.stdev[j] = 1.0;  // constant column passes through
        }
        return s;
    }

    std::vector<double> apply(const std::vector<double>& row) const {
        std::vector<double> out(row.size());
        for (std::size_t j = 0; j < row.size(); ++j) out[j] = (row[j] - mean[j]) / stdev[j];
        return out;
    }
};

double rbf(const double* a, const double* b, std::size_t d, double gamma) {
    return std::exp(-gamma * kernels::sqdist(a, b, d));
}

// Shared SMO core for
//   min 1/2 a'Qa + p'a   s.t.  y'a = 0,  0 <= a_i <= C_i
// with Q_ij = y_i y_j K_ij. Maximal-violating-pair working-set selection on
// the cached kernel matrix; deterministic.
struct SmoProblem {
    const std::vector<std::vector<double>>& kernel;  // K_ij
    std::vector<double> p;
    std::vector<double> y;  // +1/-1
    std::vector<double> c;
    double tol;
    long max_iter;
};

struct SmoSolution {
    std::vector<double> alpha;
    double bias = 0.0;
    double kkt = 0.0;
    long iters = 0;
};

SmoSolution smo_solve(const SmoProblem& prob) {
    const std::size_t n = prob.p.size();
    std::vector<double> alpha(n, 0.0);
    std::vector<double> grad = prob.p;  // gradient of the objective at alpha=0

    long it = 0;
    double gap = 0.0;
    for (; it < prob.max_iter; ++it) {
        // i: most violating in the "up" set, j: most violating in "down"
        double gmax = -std::numeric_limits<double>::infinity();
        double gmin = std::numeric_limits<double>::infinity();
        std::ptrdiff_t i = -1, j = -1;
        for (std::size_t t = 0; t < n; ++t) {
            const bool up = (prob.y[t] > 0 && alpha[t] < prob.c[t]) ||
                            (prob.y[t] < 0 && alpha[t] > 0.0);
            const bool down = (prob.y[t] > 0 && alpha[t] > 0.0) ||
                              (prob.y[t] < 0 && alpha[t] < prob.c[t]);
            const double val = -prob.y[t] * grad[t];
            if (up && val > gmax) {
                gmax = val;
                i = static_cast<std::ptrdiff_t>(t);
            }
            if (down && val < gmin) {
                gmin = val;
                j = static_cast<std::ptrdiff_t>(t);
            }
        }
        gap = gmax - gmin;
        if (i < 0 || j < 0 || gap < prob.tol) break;
        const std::size_t ii = static_cast<std::size_t>(i);
        const std::size_t jj = static_cast<std::size_t>(j);

        // analytic two-variable update along d = (y_i, -y_j)
        double quad = prob.kernel[ii][ii] + prob.kernel[jj][jj] - 2.0 * prob.kernel[ii][jj];
        if (quad <= 1e-12) quad = 1e-12;
        double delta = gap / quad;

        // clip to the box along the feasible direction
        if (prob.y[ii] > 0) {
            delta = std::min(delta, prob.c[ii] - alpha[ii]);
        } else {
            delta = std::min(delta, alpha[ii]);
        }
        if (prob.y[jj] > 0) {
            delta = std::min(delta, alpha[jj]);
        } else {
            delta = std::min(delta, prob.c[jj] - alpha[jj]);
        }

        alpha[ii] += prob.y[ii] * delta;
        alpha[jj] -= prob.y[jj] * delta;
        for (std::size_t t = 0; t < n; ++t) {
            grad[t] += delta * prob.y[t] * (prob.kernel[t][ii] - prob.kernel[t][jj]);
        }
    }

    // recompute the violation gap for the reported residual
    double gmax = -std::numeric_limits<double>::infinity();
    double gmin = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
        const bool up =
            (prob.y[t] > 0 && alpha[t] < prob.c[t]) || (prob.y[t] < 0 && alpha[t] > 0.0);
        const bool down =
            (prob.y[t] > 0 && alpha[t] > 0.0) || (prob.y[t] < 0 && alpha[t] < prob.c[t]);
        const double val = -prob.y[t] * grad[t];
        if (up) gmax = std::max(gmax, val);
        if (down) gmin = std::min(gmin, val);
    }

    SmoSolution sol;
    sol.alpha = std::move(alpha);
    sol.kkt = std::max(0.0, gmax - gmin);
    sol.bias = 0.5 * (gmax + gmin);
    sol.iters = it;
    return sol;
}

std::vector<std::vector<double>> kernel_matrix(const FeatureMatrix& x, double gamma) {
    const std::size_t n = x.size();
    std::vector<std::vector<double>> k(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
        k[i][i] = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = rbf(x[i].data(), x[j].data(), x[i].size(), gamma);
            k[i][j] = v;
            k[j][i] = v;
        }
    }
    return k;
}

void check_matrix(const FeatureMatrix& x) {
    if (x.empty()) throw ParamError("empty training set");
    const std::size_t d = x.front().size();
    if (d == 0) throw ParamError("zero-dimensional features");
    for (const auto& row : x) {
        if (row.size() != d) throw ParamError("ragged feature matrix");
        for (double v : row) {
            if (!std::isfinite(v)) throw ParamError("non-finite feature value");
        }
    }
}

}  // namespace

SvmModel train_svc(const FeatureMatrix& x, const std::vector<int>& y, const SvmParams& params) {
    check_matrix(x);
    if (y.size() != x.size()) throw ParamError("labels do not match rows");
    std::size_t pos = 0, neg = 0;
    for (int v : y) {
        if (v > 0) {
            ++pos;
        } else {
            ++neg;
        }
    }
    if (pos == 0 || neg == 0) throw ParamError("training set needs both classes");

    const auto std_ = Standardizer::fit(x);
    FeatureMatrix xs(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) xs[i] = std_.apply(x[i]);

    const double n_total = static_cast<double>(x.size());
    const double c_pos =
        params.balance_classes ? params.C * n_total / (2.0 * static_cast<double>(pos)) : params.C;
    const double c_neg =
        params.balance_classes ? params.C * n_total / (2.0 * static_cast<double>(neg)) : params.C;

    const auto kern = kernel_matrix(xs, params.gamma);
    SmoProblem prob{kern, std::vector<double>(x.size(), -1.0), {}, {}, params.tol,
                    params.max_iter};
    prob.y.resize(x.size());
    prob.c.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        prob.y[i] = y[i] > 0 ? 1.0 : -1.0;
        prob.c[i] = y[i] > 0 ? c_pos : c_neg;
    }
    const auto sol = smo_solve(prob);

    SvmModel model;
    model.mode = SvmModel::Mode::classify;
    model.gamma = params.gamma;
    model.C = params.C;
    model.epsilon = params.epsilon;
    model.bias = sol.bias;
    model.feat_mean = std_.mean;
    model.feat_std = std_.stdev;
    model.train_kkt = sol.kkt;
    model.train_iters = sol.iters;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (sol.alpha[i] > 1e-12) {
            model.support_vectors.push_back(xs[i]);
            model.dual_coef.push_back(prob.y[i] * sol.alpha[i]);
        }
    }
    return model;
}

SvmModel train_svr(const FeatureMatrix& x, const std::vector<double>& y01,
                   const SvmParams& params) {
    check_matrix(x);
    if (y01.size() != x.size()) throw ParamError("targets do not match rows");
    const std::size_t n = x.size();

    const auto std_ = Standardizer::fit(x);
    FeatureMatrix xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = std_.apply(x[i]);

    // 2n-variable expansion: a_i (positive residual side) and a*_i stacked,
    // with labels +1/-1 and linear terms eps -/+ y_i
    const auto kern = kernel_matrix(xs, params.gamma);
    std::vector<std::vector<double>> kext(2 * n, std::vector<double>(2 * n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            kext[i][j] = kern[i][j];
            kext[i][j + n] = kern[i][j];
            kext[i + n][j] = kern[i][j];
            kext[i + n][j + n] = kern[i][j];
        }
    }
    SmoProblem prob{kext, {}, {}, {}, params.tol, params.max_iter};
    prob.p.resize(2 * n);
    prob.y.resize(2 * n);
    prob.c.assign(2 * n, params.C);
    for (std::size_t i = 0; i < n; ++i) {
        prob.p[i] = params.epsilon - y01[i];
        prob.y[i] = 1.0;
        prob.p[i + n] = params.epsilon + y01[i];
        prob.y[i + n] = -1.0;
    }
    const auto sol = smo_solve(prob);

    SvmModel model;
    model.mode = SvmModel::Mode::regress;
    model.gamma = params.gamma;
    model.C = params.C;
    model.epsilon = params.epsilon;
    model.bias = sol.bias;
    model.feat_mean = std_.mean;
    model.feat_std = std_.stdev;
    model.train_kkt = sol.kkt;
    model.train_iters = sol.iters;
    for (std::size_t i = 0; i < n; ++i) {
        const double beta = sol.alpha[i] - sol.alpha[i + n];
        if (std::abs(beta) > 1e-12) {
            model.support_vectors.push_back(xs[i]);
            model.dual_coef.push_back(beta);
        }
    }
    return model;
}

double decision_value(const SvmModel& model, const std::vector<double>& x) {
    if (x.size() != model.feat_mean.size()) throw ParamError("feature length mismatch");
    std::vector<double> xs(x.size());
    for (std::size_t j = 0; j < x.size(); ++j)
        xs[j] = (x[j] - model.feat_mean[j]) / model.feat_std[j];
    double acc = model.bias;
    for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
        acc += model.dual_coef[i] *
               rbf(model.support_vectors[i].data(), xs.data(), xs.size(), model.gamma);
    }
    return acc;
}

int predict_label(const SvmModel& model, const std::vector<double>& x) {
    return decision_value(model, x) >= 0.0 ? 1 : -1;
}

double predict_probability(const SvmModel& model, const std::vector<double>& x) {
    const double v = decision_value(model, x);
    if (model.mode == SvmModel::Mode::regress) return std::clamp(v, 0.0, 1.0);
    // classify mode: squash the margin
    return 1.0 / (1.0 + std::exp(-v));
}

GridSearchResult grid_search(const FeatureMatrix& x, const std::vector<int>& y,
                             const std::vector<double>& c_grid,
                             const std::vector<double>& gamma_grid, int k_folds,
                             std::uint64_t seed, const SvmParams& base) {
    check_matrix(x);
    if (c_grid.empty() || gamma_grid.empty()) throw ParamError("empty hyperparameter grid");
    if (k_folds < 2) throw ParamError("k_folds must be >= 2");
    const std::size_t n = x.size();

    // stratified fold assignment, deterministic for the seed
    std::vector<std::size_t> pos_idx, neg_idx;
    for (std::size_t i = 0; i < n; ++i) (y[i] > 0 ? pos_idx : neg_idx).push_back(i);
    std::mt19937_64 rng(seed);
    std::shuffle(pos_idx.begin(), pos_idx.end(), rng);
    std::shuffle(neg_idx.begin(), neg_idx.end(), rng);
    std::vector<int> fold(n, 0);
    int next = 0;
    for (std::size_t i : pos_idx) fold[i] = next++ % k_folds;
    for (std::size_t i : neg_idx) fold[i] = next++ % k_folds;

    GridSearchResult result;
    for (double c : c_grid) {
        for (double g : gamma_grid) {
            double acc_sum = 0.0;
            int usable_folds = 0;
            for (int f = 0; f < k_folds; ++f) {
                FeatureMatrix xtr, xte;
                std::vector<int> ytr, yte;
                for (std::size_t i = 0; i < n; ++i) {
                    if (fold[i] == f) {
                        xte.push_back(x[i]);
                        yte.push_back(y[i]);
                    } else {
                        xtr.push_back(x[i]);
                        ytr.push_back(y[i]);
                    }
                }
                if (xte.empty()) continue;
                const bool has_both = std::any_of(ytr.begin(), ytr.end(), [](int v) { return v > 0; }) &&
                                      std::any_of(ytr.begin(), ytr.end(), [](int v) { return v <= 0; });
                if (!has_both) continue;
                SvmParams p = base;
                p.C = c;
                p.gamma = g;
                const auto model = train_svc(xtr, ytr, p);
                std::size_t correct = 0;
                for (std::size_t i = 0; i < xte.size(); ++i) {
                    if (predict_label(model, xte[i]) == (yte[i] > 0 ? 1 : -1)) ++correct;
                }
                acc_sum += static_cast<double>(correct) / static_cast<double>(xte.size());
                ++usable_folds;
            }
            const double acc = usable_folds > 0 ? acc_sum / usable_folds : 0.0;
            result.cells.push_back({c, g, acc});
            if (acc > result.best_accuracy) {
                result.best_accuracy = acc;
                result.best_c = c;
                result.best_gamma = g;
            }
        }
    }
    return result;
}

// --- serialization ----------------------------------------------------------

void SvmModel::save(const std::filesystem::path& path) const {
    nlohmann::json j{{"format", "fakecatcher-svm"},
                     {"version", 1},
                     {"mode", mode == Mode::classify ? "classify" : "regress"},
                     {"kernel", "rbf"},
                     {"gamma", gamma},
                     {"C", C},
                     {"epsilon", epsilon},
                     {"bias", bias},
                     {"feat_mean", feat_mean},
                     {"feat_std", feat_std},
                     {"support_vectors", support_vectors},
                     {"dual_coef", dual_coef},
                     {"prob_threshold", prob_threshold},
                     {"train_kkt", train_kkt}};
    std::ofstream out(path);
    if (!out) throw IngestError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << "\n";
}

SvmModel SvmModel::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open model " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IngestError("malformed model JSON: " + std::string(e.what()));
    }
    if (j.value("format", "") != "fakecatcher-svm")
        throw IngestError("not an svm model file: " + path.string());
    if (j.value("version", 0) != 1) throw IngestError("unsupported svm model version");
    SvmModel m;
    m.mode = j.at("mode").get<std::string>() == "regress" ? Mode::regress : Mode::classify;
    m.gamma = j.at("gamma").get<double>();
    m.C = j.at("C").get<double>();
    m.epsilon = j.at("epsilon").get<double>();
    m.bias = j.at("bias").get<double>();
    m.feat_mean = j.at("feat_mean").get<std::vector<double>>();
    m.feat_std = j.at("feat_std").get<std::vector<double>>();
    m.support_vectors = j.at("support_vectors").get<FeatureMatrix>();
    m.dual_coef = j.at("dual_coef").get<std::vector<double>>();
    m.prob_threshold = j.value("prob_threshold", 0.5);
    m.train_kkt = j.value("train_kkt", 0.0);
    return m;
}

}  // namespace fc
