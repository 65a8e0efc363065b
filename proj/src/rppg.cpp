#include "fakecatcher/rppg.hpp"

#include <complex>
#include <fstream>
#include <numbers>

#include "fakecatcher/fft.hpp"
#include "fakecatcher/kernels.hpp"

#include "json.hpp"

namespace fc {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// Steady-state DF2T state for a unit-step input; scaled by the actual first
// sample to suppress start-up transients.
void biquad_zi(const Biquad& q, double x0, double& z1, double& z2) {
    const double h1 = (q.b0 + q.b1 + q.b2) / (1.0 + q.a1 + q.a2);
    const double y0 = h1 * x0;
    z2 = q.b2 * x0 - q.a2 * y0;
    z1 = q.b1 * x0 - q.a1 * y0 + z2;
}

Signal sosfilt_zi(const std::vector<Biquad>& sos, const Signal& x) {
    Signal y = x;
    for (const Biquad& q : sos) {
        double z1, z2;
        biquad_zi(q, y.empty() ? 0.0 : y.front(), z1, z2);
        for (double& v : y) {
            const double in = v;
            const double out = q.b0 * in + z1;
            z1 = q.b1 * in - q.a1 * out + z2;
            z2 = q.b2 * in - q.a2 * out;
            v = out;
        }
    }
    return y;
}

}  // namespace

void PpgConfig::validate(double fps) const {
    if (fps <= 0.0) throw ParamError("fps must be positive");
    if (!(0.0 < band_low && band_low < band_high))
        throw ParamError("require 0 < band_low < band_high");
    if (band_high >= fps / 2.0) throw ParamError("band_high must be below the Nyquist frequency");
    if (filter_order < 1 || filter_order > 12) throw ParamError("filter_order out of range");
    if (!is_pow2(welch_bins) || welch_bins < 2)
        throw ParamError("welch_bins must be a power of two >= 2");
    if (welch_window < 2) throw ParamError("welch_window must be >= 2");
}

std::vector<Biquad> design_butter_bandpass(int order, double low_hz, double high_hz, double fps) {
    if (order < 1) throw ParamError("filter order must be >= 1");
    if (!(0.0 < low_hz && low_hz < high_hz && high_hz < fps / 2.0))
        throw ParamError("band edges must satisfy 0 < low < high < fps/2");

    using C = std::complex<double>;
    const int n = order;
    const double fs2 = 2.0 * fps;
    // bilinear prewarp
    const double w1 = fs2 * std::tan(kPi * low_hz / fps);
    const double w2 = fs2 * std::tan(kPi * high_hz / fps);
    const double bw = w2 - w1;
    const double w0sq = w1 * w2;

    // analog band-pass poles from the low-pass prototype
    std::vector<C> apoles;
    apoles.reserve(2 * static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double ang = kPi * (2.0 * k + n + 1.0) / (2.0 * n);
        const C proto(std::cos(ang), std::sin(ang));
        const C half = 0.5 * bw * proto;
        const C rad = std::sqrt(half * half - C(w0sq, 0.0));
        apoles.push_back(half + rad);
        apoles.push_back(half - rad);
    }
    const double again = std::pow(bw, n);

    // bilinear transform; n analog zeros at s=0 map to z=+1, the n zeros at
    // infinity map to z=-1
    std::vector<C> dpoles;
    dpoles.reserve(apoles.size());
    C gain(again, 0.0);
    for (int k = 0; k < n; ++k) gain *= C(fs2, 0.0);  // numerator factors (fs2 - 0)
    for (const C& p : apoles) {
        dpoles.push_back((C(fs2, 0.0) + p) / (C(fs2, 0.0) - p));
        gain /= (C(fs2, 0.0) - p);
    }
    const double k_digital = gain.real();

    // pair conjugate poles into second-order sections
    std::vector<C> upper;
    std::vector<double> real_poles;
    for (const C& p : dpoles) {
        if (p.imag() > 1e-12) {
            upper.push_back(p);
        } else if (p.imag() >= -1e-12) {
            real_poles.push_back(p.real());
        }
    }
    std::sort(upper.begin(), upper.end(),
              [](const C& a, const C& b) { return std::abs(a) < std::abs(b); });
    std::sort(real_poles.begin(), real_poles.end());

    std::vector<Biquad> sos;
    for (const C& p : upper) {
        Biquad q{1.0, 0.0, -1.0, -2.0 * p.real(), std::norm(p)};
        sos.push_back(q);
    }
    for (std::size_t i = 0; i + 1 < real_poles.size(); i += 2) {
        const double r1 = real_poles[i], r2 = real_poles[i + 1];
        sos.push_back(Biquad{1.0, 0.0, -1.0, -(r1 + r2), r1 * r2});
    }
    if (sos.size() != static_cast<std::size_t>(n))
        throw Error("band-pass design produced an unexpected section count");
    sos.front().b0 *= k_digital;
    sos.front().b1 *= k_digital;
    sos.front().b2 *= k_digital;
    return sos;
}

Signal sosfilt(const std::vector<Biquad>& sos, const Signal& x) {
    Signal y = x;
    for (const Biquad& q : sos) {
        double z1 = 0.0, z2 = 0.0;
        for (double& v : y) {
            const double in = v;
            const double out = q.b0 * in + z1;
            z1 = q.b1 * in - q.a1 * out + z2;
            z2 = q.b2 * in - q.a2 * out;
            v = out;
        }
    }
    return y;
}

Signal filtfilt(const std::vector<Biquad>& sos, const Signal& x) {
    const std::size_t n = x.size();
    if (n < 4) throw ParamError("filtfilt needs at least 4 samples");
    const std::size_t want = std::max<std::size_t>(27, 3 * (2 * sos.size() + 1));
    const std::size_t pad = std::min(n - 1, want);

    Signal ext;
    ext.reserve(n + 2 * pad);
    for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x.front() - x[i]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x.back() - x[n - 1 - i]);

    Signal y = sosfilt_zi(sos, ext);
    std::reverse(y.begin(), y.end());
    y = sosfilt_zi(sos, y);
    std::reverse(y.begin(), y.end());
    return Signal(y.begin() + static_cast<std::ptrdiff_t>(pad),
                  y.begin() + static_cast<std::ptrdiff_t>(pad + n));
}

Signal butterworth_bandpass(const Signal& x, double fps, const PpgConfig& cfg) {
    cfg.validate(fps);
    if (!all_finite(x)) throw ParamError("band-pass input contains non-finite values");
    const auto sos = design_butter_bandpass(cfg.filter_order, cfg.band_low, cfg.band_high, fps);
    return filtfilt(sos, x);
}

Signal gppg(const RegionTrace& trace, const PpgConfig& cfg) {
    if (!all_finite(trace.mean_g)) throw ParamError("green trace contains non-finite values");
    Signal x = trace.mean_g;
    const double m = stats::mean(x);
    for (double& v : x) v -= m;
    return butterworth_bandpass(x, trace.fps, cfg);
}

Signal chrom_ppg(const RegionTrace& trace, const PpgConfig& cfg, bool* degenerate) {
    if (degenerate) *degenerate = false;
    const std::size_t n = trace.size();
    if (n == 0) throw ParamError("empty trace");
    for (const Signal* ch : {&trace.mean_r, &trace.mean_g, &trace.mean_b}) {
        if (!all_finite(*ch)) throw ParamError("trace contains non-finite values");
    }
    const double mr = stats::mean(trace.mean_r);
    const double mg = stats::mean(trace.mean_g);
    const double mb = stats::mean(trace.mean_b);
    if (mr <= 0.0 || mg <= 0.0 || mb <= 0.0)
        throw ParamError("chrominance PPG requires positive channel means");

    Signal xs(n), ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = trace.mean_r[i] / mr;
        const double g = trace.mean_g[i] / mg;
        const double b = trace.mean_b[i] / mb;
        xs[i] = 3.0 * r - 2.0 * g;
        ys[i] = 1.5 * r + g - 1.5 * b;
    }
    const double mx = stats::mean(xs);
    const double my = stats::mean(ys);
    for (double& v : xs) v -= mx;
    for (double& v : ys) v -= my;

    Signal xf = butterworth_bandpass(xs, trace.fps, cfg);
    Signal yf = butterworth_bandpass(ys, trace.fps, cfg);
    const double sy = stats::stddev(yf);
    if (sy < 1e-14) {
        if (degenerate) *degenerate = true;
        return xf;
    }
    const double alpha = stats::stddev(xf) / sy;
    for (std::size_t i = 0; i < n; ++i) xf[i] -= alpha * yf[i];
    return xf;
}

namespace {

Spectrum welch_impl(const Signal& x, const Signal& y, double fps, const PpgConfig& cfg) {
    if (fps <= 0.0) throw ParamError("fps must be positive");
    if (cfg.welch_bins < 2 || (cfg.welch_bins & (cfg.welch_bins - 1)) != 0)
        throw ParamError("welch_bins must be a power of two >= 2");
    if (cfg.welch_window < 2) throw ParamError("welch_window must be >= 2");
    if (x.size() != y.size()) throw ParamError("cross spectral density length mismatch");
    const std::size_t n = x.size();
    if (n < 2) throw ParamError("signal shorter than one analysis window");

    const std::size_t bins = static_cast<std::size_t>(cfg.welch_bins);
    const std::size_t nfft = 2 * bins;
    const std::size_t win =
        std::min({n, static_cast<std::size_t>(cfg.welch_window), nfft});
    const std::size_t hop = std::max<std::size_t>(1, win / 2);

    Signal w(win, 1.0);
    if (win > 1) {
        for (std::size_t i = 0; i < win; ++i)
            w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) /
                                        static_cast<double>(win - 1));
    }
    const double u = kernels::sumsq(w.data(), w.size());

    std::vector<cplx> acc(bins, cplx(0.0, 0.0));
    std::size_t nseg = 0;
    std::vector<cplx> bufx(nfft), bufy(nfft);
    for (std::size_t start = 0; start + win <= n; start += hop) {
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < win; ++i) {
            mx += x[start + i];
            my += y[start + i];
        }
        mx /= static_cast<double>(win);
        my /= static_cast<double>(win);
        std::fill(bufx.begin(), bufx.end(), cplx(0.0, 0.0));
        std::fill(bufy.begin(), bufy.end(), cplx(0.0, 0.0));
        for (std::size_t i = 0; i < win; ++i) {
            bufx[i] = cplx(w[i] * (x[start + i] - mx), 0.0);
            bufy[i] = cplx(w[i] * (y[start + i] - my), 0.0);
        }
        auto fx = fft(bufx);
        auto fy = fft(bufy);
        for (std::size_t k = 0; k < bins; ++k) acc[k] += fx[k] * std::conj(fy[k]);
        ++nseg;
        if (start + win == n) break;
    }
    if (nseg == 0) throw ParamError("signal shorter than one analysis window");

    Spectrum out;
    out.freqs.resize(bins);
    out.power.resize(bins);
    const double scale = 1.0 / (fps * u * static_cast<double>(nseg));
    for (std::size_t k = 0; k < bins; ++k) {
        out.freqs[k] = static_cast<double>(k) * fps / static_cast<double>(nfft);
        const double one_sided = (k == 0) ? 1.0 : 2.0;
        out.power[k] = std::abs(acc[k]) * scale * one_sided;
    }
    return out;
}

}  // namespace

Spectrum welch_psd(const Signal& x, double fps, const PpgConfig& cfg) {
    return welch_impl(x, x, fps, cfg);
}

Spectrum welch_cross_psd(const Signal& x, const Signal& y, double fps, const PpgConfig& cfg) {
    return welch_impl(x, y, fps, cfg);
}

std::array<const Signal*, 6> SignalBundle::s() const {
    return {&g_left, &g_right, &g_mid, &c_left, &c_right, &c_mid};
}

const std::array<std::string_view, 6>& SignalBundle::s_names() {
    static const std::array<std::string_view, 6> names = {"G_L", "G_R", "G_M",
                                                          "C_L", "C_R", "C_M"};
    return names;
}

std::array<const Signal*, 3> SignalBundle::s_c() const { return {&c_left, &c_right, &c_mid}; }

const std::array<std::string_view, 3>& SignalBundle::s_c_names() {
    static const std::array<std::string_view, 3> names = {"C_L", "C_R", "C_M"};
    return names;
}

namespace {
Signal abs_diff(const Signal& a, const Signal& b) {
    Signal out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = std::abs(a[i] - b[i]);
    return out;
}
}  // namespace

std::array<Signal, 3> SignalBundle::d() const {
    return {abs_diff(c_left, g_left), abs_diff(c_right, g_right), abs_diff(c_mid, g_mid)};
}

std::array<Signal, 3> SignalBundle::d_c() const {
    return {abs_diff(c_left, c_mid), abs_diff(c_left, c_right), abs_diff(c_right, c_mid)};
}

const std::array<std::string_view, 3>& SignalBundle::d_c_names() {
    static const std::array<std::string_view, 3> names = {"DC_LM", "DC_LR", "DC_RM"};
    return names;
}

void SignalBundle::validate() const {
    const std::size_t n = g_left.size();
    for (const Signal* sig : s()) {
        if (sig->size() != n) throw ParamError("bundle signals have unequal lengths");
        if (!all_finite(*sig)) throw ParamError("bundle contains non-finite values");
    }
    if (fps <= 0.0) throw ParamError("bundle fps must be positive");
}

SignalBundle build_bundle(const RegionTrace& left, const RegionTrace& mid,
                          const RegionTrace& right, const PpgConfig& cfg) {
    if (left.size() != mid.size() || mid.size() != right.size())
        throw ParamError("region traces are not aligned");
    if (left.fps != mid.fps || mid.fps != right.fps)
        throw ParamError("region traces disagree on fps");
    SignalBundle b;
    b.fps = left.fps;
    b.g_left = gppg(left, cfg);
    b.g_right = gppg(right, cfg);
    b.g_mid = gppg(mid, cfg);
    b.c_left = chrom_ppg(left, cfg);
    b.c_right = chrom_ppg(right, cfg);
    b.c_mid = chrom_ppg(mid, cfg);
    b.validate();
    return b;
}

void write_signal_dump(const std::filesystem::path& csv_path, const SignalBundle& bundle) {
    std::ofstream out(csv_path);
    if (!out) throw IngestError("cannot open " + csv_path.string() + " for writing");
    out << "t,G_L,G_M,G_R,C_L,C_M,C_R\n";
    char buf[64];
    for (std::size_t i = 0; i < bundle.omega(); ++i) {
        const double t = static_cast<double>(i) / bundle.fps;
        out << t;
        for (const Signal* sig :
             {&bundle.g_left, &bundle.g_mid, &bundle.g_right, &bundle.c_left, &bundle.c_mid,
              &bundle.c_right}) {
            std::snprintf(buf, sizeof(buf), ",%.9g", (*sig)[i]);
            out << buf;
        }
        out << "\n";
    }
}

void write_ppg_config_json(const std::filesystem::path& path, const PpgConfig& cfg, double fps) {
    nlohmann::json j{{"band_low", cfg.band_low},
                     {"band_high", cfg.band_high},
                     {"filter_order", cfg.filter_order},
                     {"welch_bins", cfg.welch_bins},
                     {"welch_window", cfg.welch_window},
                     {"h_low", cfg.h_low},
                     {"h_high", cfg.h_high},
                     {"fps", fps}};
    std::ofstream out(path);
    if (!out) throw IngestError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << "\n";
}

}  // namespace fc
