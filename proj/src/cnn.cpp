#include "fakecatcher/cnn.hpp"

#include <fstream>
#include <numbers>
#include <numeric>
#include <random>

#include "fakecatcher/fft.hpp"
#include "fakecatcher/image.hpp"
#include "fakecatcher/kernels.hpp"

#include "json.hpp"

namespace fc {

// --- maps -------------------------------------------------------------------

void PpgMap::validate() const {
    if (rows <= 0 || cols <= 0) throw ParamError("empty map");
    if (kind == Kind::temporal && cols != 32) throw ParamError("temporal map must have 32 columns");
    if (kind == Kind::spectral && cols != 64) throw ParamError("spectral map must have 64 columns");
    if (data.size() != static_cast<std::size_t>(rows) * cols)
        throw ParamError("map payload does not match dimensions");
}

namespace {

void quantize_column(const Signal& trace, PpgMap& map, int col) {
    const double lo = stats::min(trace);
    const double hi = stats::max(trace);
    if (hi - lo < 1e-12) {
        map.constant_columns[static_cast<std::size_t>(col)] = 1;
        return;  // column stays zero
    }
    const double scale = 255.0 / (hi - lo);
    for (int r = 0; r < map.rows; ++r) {
        const double v = (trace[static_cast<std::size_t>(r)] - lo) * scale;
        map.data[static_cast<std::size_t>(r) * map.cols + col] =
            static_cast<std::uint8_t>(std::lround(v));
    }
}

// full-length Hann periodogram with a 2*omega-point transform: exactly
// omega one-sided bins for any omega
Signal omega_binned_psd(const Signal& x, double fps) {
    const std::size_t n = x.size();
    const double mean = stats::mean(x);
    std::vector<cplx> buf(2 * n, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        const double w =
            n > 1 ? 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                         static_cast<double>(n - 1))
                  : 1.0;
        buf[i] = cplx(w * (x[i] - mean), 0.0);
    }
    buf = fft(std::move(buf));
    Signal psd(n);
    for (std::size_t k = 0; k < n; ++k) psd[k] = std::norm(buf[k]) / (fps * static_cast<double>(n));
    return psd;
}

}  // namespace

PpgMap build_ppg_map(const std::vector<Signal>& cell_traces) {
    if (cell_traces.size() != 32) throw ParamError("temporal map needs exactly 32 cell traces");
    const std::size_t omega = cell_traces.front().size();
    if (omega < 1) throw ParamError("empty cell traces");
    for (const Signal& t : cell_traces) {
        if (t.size() != omega) throw ParamError("cell traces have unequal lengths");
    }
    PpgMap map;
    map.kind = PpgMap::Kind::temporal;
    map.rows = static_cast<int>(omega);
    map.cols = 32;
    map.data.assign(omega * 32, 0);
    map.constant_columns.assign(32, 0);
    for (int c = 0; c < 32; ++c) quantize_column(cell_traces[static_cast<std::size_t>(c)], map, c);
    return map;
}

PpgMap build_spectral_map(const std::vector<Signal>& cell_traces, double fps) {
    if (cell_traces.size() != 32) throw ParamError("spectral map needs exactly 32 cell traces");
    const std::size_t omega = cell_traces.front().size();
    PpgMap map;
    map.kind = PpgMap::Kind::spectral;
    map.rows = static_cast<int>(omega);
    map.cols = 64;
    map.data.assign(omega * 64, 0);
    map.constant_columns.assign(64, 0);
    for (int c = 0; c < 32; ++c) {
        const Signal& trace = cell_traces[static_cast<std::size_t>(c)];
        if (trace.size() != omega) throw ParamError("cell traces have unequal lengths");
        quantize_column(trace, map, c);
        quantize_column(omega_binned_psd(trace, fps), map, c + 32);
    }
    return map;
}

void save_ppg_map(const std::filesystem::path& path, const PpgMap& map) {
    map.validate();
    save_pgm(path, map.data, map.cols, map.rows);
}

PpgMap load_ppg_map(const std::filesystem::path& path, PpgMap::Kind kind) {
    PpgMap map;
    int w = 0, h = 0;
    map.data = load_pgm(path, w, h);
    map.cols = w;
    map.rows = h;
    map.kind = kind;
    map.constant_columns.assign(static_cast<std::size_t>(w), 0);
    map.validate();
    return map;
}

// --- model ------------------------------------------------------------------

CnnModel::Layout CnnModel::layout() const {
    Layout l{};
    const int in_ch[3] = {1, cfg.conv_filters[0], cfg.conv_filters[1]};
    int r = input_rows, c = input_cols;
    std::size_t off = 0;
    for (int i = 0; i < 3; ++i) {
        l.conv_w[i] = off;
        off += static_cast<std::size_t>(cfg.conv_filters[i]) * in_ch[i] * 9;
        l.conv_b[i] = off;
        off += static_cast<std::size_t>(cfg.conv_filters[i]);
        r /= 2;
        c /= 2;
        l.pooled_rows[i] = r;
        l.pooled_cols[i] = c;
    }
    l.flat_size = cfg.conv_filters[2] * r * c;
    l.dense1_w = off;
    off += static_cast<std::size_t>(cfg.dense_units) * l.flat_size;
    l.dense1_b = off;
    off += static_cast<std::size_t>(cfg.dense_units);
    l.dense2_w = off;
    off += static_cast<std::size_t>(cfg.dense_units);
    l.dense2_b = off;
    off += 1;
    l.total = off;
    return l;
}

CnnModel CnnModel::init(int rows, int cols, const CnnConfig& cfg, std::uint64_t seed) {
    if (rows < 8 || cols < 8) throw ParamError("map too small for three pooling stages");
    CnnModel m;
    m.input_rows = rows;
    m.input_cols = cols;
    m.cfg = cfg;
    const Layout l = m.layout();
    m.params.assign(l.total, 0.0);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int in_ch[3] = {1, cfg.conv_filters[0], cfg.conv_filters[1]};
    for (int i = 0; i < 3; ++i) {
        const double scale = std::sqrt(2.0 / (in_ch[i] * 9.0));
        const std::size_t count = static_cast<std::size_t>(cfg.conv_filters[i]) * in_ch[i] * 9;
        for (std::size_t k = 0; k < count; ++k) m.params[l.conv_w[i] + k] = scale * gauss(rng);
    }
    const double s1 = std::sqrt(2.0 / static_cast<double>(l.flat_size));
    for (std::size_t k = 0; k < static_cast<std::size_t>(cfg.dense_units) * l.flat_size; ++k)
        m.params[l.dense1_w + k] = s1 * gauss(rng);
    const double s2 = std::sqrt(2.0 / static_cast<double>(cfg.dense_units));
    for (std::size_t k = 0; k < static_cast<std::size_t>(cfg.dense_units); ++k)
        m.params[l.dense2_w + k] = s2 * gauss(rng);
    return m;
}

namespace {

struct Tensor {
    int ch = 0, rows = 0, cols = 0;
    std::vector<double> v;
    void resize(int c, int r, int w) {
        ch = c;
        rows = r;
        cols = w;
        v.assign(static_cast<std::size_t>(c) * r * w, 0.0);
    }
    double& at(int c, int y, int x) {
        return v[(static_cast<std::size_t>(c) * rows + y) * cols + x];
    }
    double at(int c, int y, int x) const {
        return v[(static_cast<std::size_t>(c) * rows + y) * cols + x];
    }
};

// 3x3 convolution, stride 1, zero padding
void conv3x3(const Tensor& in, const double* w, const double* b, int out_ch, Tensor& out) {
    out.resize(out_ch, in.rows, in.cols);
    for (int oc = 0; oc < out_ch; ++oc) {
        for (int y = 0; y < in.rows; ++y) {
            for (int x = 0; x < in.cols; ++x) {
                double acc = b[oc];
                for (int ic = 0; ic < in.ch; ++ic) {
                    const double* wk = w + (static_cast<std::size_t>(oc) * in.ch + ic) * 9;
                    for (int ky = 0; ky < 3; ++ky) {
                        const int yy = y + ky - 1;
                        if (yy < 0 || yy >= in.rows) continue;
                        for (int kx = 0; kx < 3; ++kx) {
                            const int xx = x + kx - 1;
                            if (xx < 0 || xx >= in.cols) continue;
                            acc += wk[ky * 3 + kx] * in.at(ic, yy, xx);
                        }
                    }
                }
                out.at(oc, y, x) = acc;
            }
        }
    }
}

void relu_inplace(Tensor& t) {
    for (double& v : t.v) v = v > 0.0 ? v : 0.0;
}

void maxpool2(const Tensor& in, Tensor& out, std::vector<std::size_t>& argmax) {
    const int r = in.rows / 2, c = in.cols / 2;
    out.resize(in.ch, r, c);
    argmax.assign(out.v.size(), 0);
    for (int ch = 0; ch < in.ch; ++ch) {
        for (int y = 0; y < r; ++y) {
            for (int x = 0; x < c; ++x) {
                double best = -std::numeric_limits<double>::infinity();
                std::size_t best_idx = 0;
                for (int dy = 0; dy < 2; ++dy) {
                    for (int dx = 0; dx < 2; ++dx) {
                        const std::size_t idx =
                            (static_cast<std::size_t>(ch) * in.rows + (2 * y + dy)) * in.cols +
                            (2 * x + dx);
                        if (in.v[idx] > best) {
                            best = in.v[idx];
                            best_idx = idx;
                        }
                    }
                }
                out.at(ch, y, x) = best;
                argmax[(static_cast<std::size_t>(ch) * r + y) * c + x] = best_idx;
            }
        }
    }
}

struct ForwardState {
    Tensor input;
    Tensor conv_out[3];   // pre-activation
    Tensor pooled[3];
    std::vector<std::size_t> argmax[3];
    std::vector<double> dense1_pre;
    std::vector<double> dense1_act;   // after relu and (optionally) dropout
    double logit = 0.0;
    double prob = 0.5;
};

void forward_pass(const CnnModel& model, const PpgMap& map, const std::vector<double>& mask,
                  ForwardState& st) {
    if (map.rows != model.input_rows || map.cols != model.input_cols)
        throw ParamError("map dimensions do not match the model input");
    const auto l = model.layout();
    const double* p = model.params.data();

    st.input.resize(1, map.rows, map.cols);
    for (std::size_t i = 0; i < map.data.size(); ++i) st.input.v[i] = map.data[i] / 255.0;

    const Tensor* cur = &st.input;
    for (int i = 0; i < 3; ++i) {
        conv3x3(*cur, p + l.conv_w[i], p + l.conv_b[i], model.cfg.conv_filters[i],
                st.conv_out[i]);
        Tensor act = st.conv_out[i];
        relu_inplace(act);
        maxpool2(act, st.pooled[i], st.argmax[i]);
        cur = &st.pooled[i];
    }

    const int units = model.cfg.dense_units;
    st.dense1_pre.resize(static_cast<std::size_t>(units));
    st.dense1_act.resize(static_cast<std::size_t>(units));
    const std::size_t flat = static_cast<std::size_t>(l.flat_size);
    for (int u = 0; u < units; ++u) {
        const double* row = p + l.dense1_w + static_cast<std::size_t>(u) * flat;
        st.dense1_pre[static_cast<std::size_t>(u)] =
            kernels::dot(row, cur->v.data(), flat) + p[l.dense1_b + static_cast<std::size_t>(u)];
    }
    for (int u = 0; u < units; ++u) {
        double a = std::max(0.0, st.dense1_pre[static_cast<std::size_t>(u)]);
        if (!mask.empty()) a *= mask[static_cast<std::size_t>(u)];
        st.dense1_act[static_cast<std::size_t>(u)] = a;
    }
    st.logit = kernels::dot(p + l.dense2_w, st.dense1_act.data(),
                            static_cast<std::size_t>(units)) +
               p[l.dense2_b];
    st.prob = 1.0 / (1.0 + std::exp(-st.logit));
}

double bce_loss(double logit, int label) {
    // numerically stable: max(z,0) - z*y + log(1 + exp(-|z|))
    return std::max(logit, 0.0) - logit * static_cast<double>(label) +
           std::log1p(std::exp(-std::abs(logit)));
}

}  // namespace

double cnn_forward(const CnnModel& model, const PpgMap& map) {
    ForwardState st;
    forward_pass(model, map, {}, st);
    return std::clamp(st.prob, 1e-12, 1.0 - 1e-12);
}

double cnn_loss(const CnnModel& model, const PpgMap& map, int label,
                const std::vector<double>& dropout_mask, std::vector<double>* grad) {
    ForwardState st;
    forward_pass(model, map, dropout_mask, st);
    const double loss = bce_loss(st.logit, label);
    if (!grad) return loss;

    const auto l = model.layout();
    grad->assign(l.total, 0.0);
    const double* p = model.params.data();
    double* g = grad->data();

    const int units = model.cfg.dense_units;
    const std::size_t flat = static_cast<std::size_t>(l.flat_size);
    const double dz = st.prob - static_cast<double>(label);

    // dense2
    for (int u = 0; u < units; ++u)
        g[l.dense2_w + static_cast<std::size_t>(u)] = dz * st.dense1_act[static_cast<std::size_t>(u)];
    g[l.dense2_b] = dz;

    // back through dropout and relu into dense1
    std::vector<double> d_pre1(static_cast<std::size_t>(units));
    for (int u = 0; u < units; ++u) {
        double d = dz * p[l.dense2_w + static_cast<std::size_t>(u)];
        if (!dropout_mask.empty()) d *= dropout_mask[static_cast<std::size_t>(u)];
        d_pre1[static_cast<std::size_t>(u)] =
            st.dense1_pre[static_cast<std::size_t>(u)] > 0.0 ? d : 0.0;
    }
    const Tensor& flat_in = st.pooled[2];
    std::vector<double> d_flat(flat, 0.0);
    for (int u = 0; u < units; ++u) {
        const double du = d_pre1[static_cast<std::size_t>(u)];
        const double* row = p + l.dense1_w + static_cast<std::size_t>(u) * flat;
        double* grow = g + l.dense1_w + static_cast<std::size_t>(u) * flat;
        kernels::axpy(du, flat_in.v.data(), grow, flat);
        kernels::axpy(du, row, d_flat.data(), flat);
        g[l.dense1_b + static_cast<std::size_t>(u)] = du;
    }

    // back through the conv stack
    Tensor d_pooled;
    d_pooled.resize(flat_in.ch, flat_in.rows, flat_in.cols);
    d_pooled.v = d_flat;
    for (int i = 2; i >= 0; --i) {
        // unpool into the relu output shape
        Tensor d_act;
        d_act.resize(st.conv_out[i].ch, st.conv_out[i].rows, st.conv_out[i].cols);
        for (std::size_t k = 0; k < d_pooled.v.size(); ++k)
            d_act.v[st.argmax[i][k]] += d_pooled.v[k];
        // relu gate on the pre-activation
        for (std::size_t k = 0; k < d_act.v.size(); ++k) {
            if (st.conv_out[i].v[k] <= 0.0) d_act.v[k] = 0.0;
        }
        const Tensor& in = i == 0 ? st.input : st.pooled[i - 1];
        const double* w = p + l.conv_w[i];
        double* gw = g + l.conv_w[i];
        double* gb = g + l.conv_b[i];
        Tensor d_in;
        d_in.resize(in.ch, in.rows, in.cols);
        for (int oc = 0; oc < d_act.ch; ++oc) {
            for (int y = 0; y < d_act.rows; ++y) {
                for (int x = 0; x < d_act.cols; ++x) {
                    const double d = d_act.at(oc, y, x);
                    if (d == 0.0) continue;
                    gb[oc] += d;
                    for (int ic = 0; ic < in.ch; ++ic) {
                        const double* wk = w + (static_cast<std::size_t>(oc) * in.ch + ic) * 9;
                        double* gk = gw + (static_cast<std::size_t>(oc) * in.ch + ic) * 9;
                        for (int ky = 0; ky < 3; ++ky) {
                            const int yy = y + ky - 1;
                            if (yy < 0 || yy >= in.rows) continue;
                            for (int kx = 0; kx < 3; ++kx) {
                                const int xx = x + kx - 1;
                                if (xx < 0 || xx >= in.cols) continue;
                                gk[ky * 3 + kx] += d * in.at(ic, yy, xx);
                                d_in.at(ic, yy, xx) += d * wk[ky * 3 + kx];
                            }
                        }
                    }
                }
            }
        }
        d_pooled = std::move(d_in);
    }
    return loss;
}

CnnTrainResult cnn_train(CnnModel& model, const std::vector<PpgMap>& maps,
                         const std::vector<int>& labels, int epochs, std::uint64_t seed,
                         double stop_loss) {
    if (maps.empty()) throw ParamError("empty training set");
    if (maps.size() != labels.size()) throw ParamError("labels do not match maps");
    CnnTrainResult result;
    {
        const bool has0 = std::any_of(labels.begin(), labels.end(), [](int v) { return v == 0; });
        const bool has1 = std::any_of(labels.begin(), labels.end(), [](int v) { return v == 1; });
        result.single_class_warning = !(has0 && has1);
    }

    std::mt19937_64 rng(seed);
    std::bernoulli_distribution keep(1.0 - model.cfg.dropout);
    const auto l = model.layout();
    std::vector<double> velocity(l.total, 0.0);
    std::vector<double> grad_acc(l.total, 0.0);
    std::vector<double> grad(l.total, 0.0);
    std::vector<double> mask(static_cast<std::size_t>(model.cfg.dense_units));
    std::vector<std::size_t> order(maps.size());
    std::iota(order.begin(), order.end(), 0UL);

    for (int epoch = 0; epoch < epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(model.cfg.batch_size)) {
            const std::size_t end =
                std::min(order.size(), start + static_cast<std::size_t>(model.cfg.batch_size));
            std::fill(grad_acc.begin(), grad_acc.end(), 0.0);
            for (std::size_t b = start; b < end; ++b) {
                const std::size_t idx = order[b];
                if (model.cfg.dropout > 0.0) {
                    for (double& m : mask)
                        m = keep(rng) ? 1.0 / (1.0 - model.cfg.dropout) : 0.0;
                }
                epoch_loss += cnn_loss(model, maps[idx], labels[idx],
                                       model.cfg.dropout > 0.0 ? mask : std::vector<double>{},
                                       &grad);
                kernels::axpy(1.0, grad.data(), grad_acc.data(), l.total);
            }
            const double inv = 1.0 / static_cast<double>(end - start);
            for (std::size_t k = 0; k < l.total; ++k) {
                velocity[k] = model.cfg.momentum * velocity[k] -
                              model.cfg.learning_rate * grad_acc[k] * inv;
                model.params[k] += velocity[k];
            }
        }
        epoch_loss /= static_cast<double>(maps.size());
        result.epoch_loss.push_back(epoch_loss);
        if (stop_loss > 0.0 && epoch_loss < stop_loss) break;
    }
    return result;
}

double cnn_gradcheck(const CnnModel& model, const PpgMap& map, int label, int n_samples,
                     double h, std::uint64_t seed) {
    const auto l = model.layout();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, l.total - 1);
    // fixed dropout mask so both gradient routes see the same function
    std::vector<double> mask(static_cast<std::size_t>(model.cfg.dense_units));
    std::bernoulli_distribution keep(1.0 - model.cfg.dropout);
    for (double& m : mask) m = keep(rng) ? 1.0 / (1.0 - model.cfg.dropout) : 0.0;

    std::vector<double> grad;
    cnn_loss(model, map, label, mask, &grad);

    CnnModel probe = model;
    double worst = 0.0;
    for (int s = 0; s < n_samples; ++s) {
        const std::size_t idx = pick(rng);
        const double saved = probe.params[idx];
        probe.params[idx] = saved + h;
        const double up = cnn_loss(probe, map, label, mask, nullptr);
        probe.params[idx] = saved - h;
        const double down = cnn_loss(probe, map, label, mask, nullptr);
        probe.params[idx] = saved;
        const double fd = (up - down) / (2.0 * h);
        const double denom = std::max({std::abs(fd), std::abs(grad[idx]), 1e-8});
        worst = std::max(worst, std::abs(fd - grad[idx]) / denom);
    }
    return worst;
}

// --- serialization ----------------------------------------------------------

void CnnModel::save(const std::filesystem::path& path) const {
    nlohmann::json j{{"format", "fakecatcher-cnn"},
                     {"version", 1},
                     {"input_rows", input_rows},
                     {"input_cols", input_cols},
                     {"conv_filters", cfg.conv_filters},
                     {"dense_units", cfg.dense_units},
                     {"dropout", cfg.dropout},
                     {"learning_rate", cfg.learning_rate},
                     {"momentum", cfg.momentum},
                     {"batch_size", cfg.batch_size},
                     {"params", params}};
    std::ofstream out(path);
    if (!out) throw IngestError("cannot open " + path.string() + " for writing");
    out << j.dump() << "\n";
}

CnnModel CnnModel::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open model " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IngestError("malformed model JSON: " + std::string(e.what()));
    }
    if (j.value("format", "") != "fakecatcher-cnn")
        throw IngestError("not a cnn model file: " + path.string());
    if (j.value("version", 0) != 1) throw IngestError("unsupported cnn model version");
    CnnModel m;
    m.input_rows = j.at("input_rows").get<int>();
    m.input_cols = j.at("input_cols").get<int>();
    m.cfg.conv_filters = j.at("conv_filters").get<std::array<int, 3>>();
    m.cfg.dense_units = j.at("dense_units").get<int>();
    m.cfg.dropout = j.at("dropout").get<double>();
    m.cfg.learning_rate = j.at("learning_rate").get<double>();
    m.cfg.momentum = j.at("momentum").get<double>();
    m.cfg.batch_size = j.at("batch_size").get<int>();
    m.params = j.at("params").get<std::vector<double>>();
    if (m.params.size() != m.layout().total) throw IngestError("parameter count mismatch");
    return m;
}

}  // namespace fc
