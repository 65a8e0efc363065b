#include "fakecatcher/features.hpp"

#include <numeric>
#include <set>

#include "fakecatcher/fft.hpp"
#include "fakecatcher/kernels.hpp"

namespace fc {

void FeatureVector::validate() const {
    if (values.size() != names.size()) throw ParamError("feature names/values out of sync");
    std::set<std::string> seen;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]))
            throw ParamError("non-finite feature value at " + names[i]);
        if (!seen.insert(names[i]).second) throw ParamError("duplicate feature name " + names[i]);
    }
}

std::vector<Peak> find_peaks(const Signal& x, double min_prominence_frac) {
    std::vector<Peak> peaks;
    const std::size_t n = x.size();
    if (n < 3) return peaks;
    const double range = stats::max(x) - stats::min(x);
    if (range <= 0.0) return peaks;
    const double min_prom = min_prominence_frac * range;

    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(x[i] > x[i - 1] && x[i] >= x[i + 1])) continue;
        // walk outward until a higher sample; the valley floor on each side
        // bounds the prominence
        double left_min = x[i];
        for (std::size_t j = i; j-- > 0;) {
            if (x[j] > x[i]) break;
            left_min = std::min(left_min, x[j]);
        }
        double right_min = x[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            if (x[j] > x[i]) break;
            right_min = std::min(right_min, x[j]);
        }
        const double prominence = x[i] - std::max(left_min, right_min);
        if (prominence < min_prom) continue;

        const double half = x[i] - 0.5 * prominence;
        std::size_t lo = i, hi = i;
        while (lo > 0 && x[lo - 1] >= half) --lo;
        while (hi + 1 < n && x[hi + 1] >= half) ++hi;
        peaks.push_back(Peak{i, prominence, static_cast<double>(hi - lo + 1)});
    }
    return peaks;
}

std::array<double, 2> f1_cross_psd_stats(const Signal& a, const Signal& b, double fps,
                                         const PpgConfig& cfg) {
    const Spectrum spec = welch_cross_psd(a, b, fps, cfg);
    double m = 0.0, mx = 0.0;
    for (double p : spec.power) {
        m += p;
        mx = std::max(mx, p);
    }
    return {m / static_cast<double>(spec.size()), mx};
}

std::array<double, 13> f2_stats(const Signal& x, double fps, const PpgConfig& cfg) {
    const std::size_t n = x.size();
    if (n < 3) throw ParamError("f2 needs at least 3 samples");

    Signal diff(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) diff[i] = x[i + 1] - x[i];

    double rms_diff = 0.0, mean_abs = 0.0, neg = 0.0;
    for (double d : diff) {
        rms_diff += d * d;
        mean_abs += std::abs(d);
        if (d < 0.0) neg += 1.0;
    }
    const double nd = static_cast<double>(diff.size());
    rms_diff = std::sqrt(rms_diff / nd);
    mean_abs /= nd;
    const double neg_ratio = neg / nd;

    std::size_t crossings = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (x[i] * x[i + 1] < 0.0) ++crossings;
    }
    const double zcr = static_cast<double>(crossings) / static_cast<double>(n);

    const auto peaks = find_peaks(x);
    double pm = 0.0, ps = 0.0, wm = 0.0, ws = 0.0;
    if (!peaks.empty()) {
        Signal proms, widths;
        for (const Peak& p : peaks) {
            proms.push_back(p.prominence);
            widths.push_back(p.width);
        }
        pm = stats::mean(proms);
        ps = stats::stddev(proms);
        wm = stats::mean(widths);
        ws = stats::stddev(widths);
    }

    const double dmax = stats::max(diff);
    const double dmin = stats::min(diff);
    const double dmean = stats::mean(diff);

    double centroid = 0.0;
    const Spectrum spec = welch_psd(x, fps, cfg);
    const double total = kernels::sum(spec.power.data(), spec.power.size());
    if (total > 0.0) {
        for (std::size_t k = 0; k < spec.size(); ++k) centroid += spec.freqs[k] * spec.power[k];
        centroid /= total;
    }

    return {rms_diff, stats::stddev(x), mean_abs, neg_ratio, zcr,   pm,   ps,
            wm,       ws,               dmax,     dmin,      dmean, centroid};
}

std::array<double, 4> f3_spectral_autocorr_feats(const Signal& x, double fps,
                                                 const PpgConfig& cfg) {
    bool degenerate = false;
    const Signal sac = spectral_autocorr(x, &degenerate);
    if (degenerate) return {0.0, 0.0, 0.0, 0.0};

    // pulse threshold from the spectral-autocorrelation median, line
    // threshold from the PSD bin statistics
    const double theta_p = 3.0 * stats::median(sac);
    double pulses = 0.0, pulse_energy = 0.0;
    for (std::size_t i = 1; i + 1 < sac.size(); ++i) {
        if (sac[i] > sac[i - 1] && sac[i] >= sac[i + 1] && sac[i] > theta_p) {
            pulses += 1.0;
            pulse_energy += sac[i] * sac[i];
        }
    }
    if (pulses > 0.0) pulse_energy /= pulses;

    const Spectrum spec = welch_psd(x, fps, cfg);
    const double theta_l = stats::mean(spec.power) + 3.0 * stats::stddev(spec.power);
    double lines = 0.0;
    for (double p : spec.power) {
        if (p > theta_l) lines += 1.0;
    }

    double max_sac = 0.0;  // beyond lag 0, which is 1 by normalization
    for (std::size_t i = 1; i < sac.size(); ++i) max_sac = std::max(max_sac, sac[i]);
    return {pulses, lines, pulse_energy, max_sac};
}

std::array<double, 8> f4_hrv_feats(const Signal& x, double fps) {
    const std::size_t n = x.size();
    const std::size_t win = static_cast<std::size_t>(fps);
    if (win < 2 || n < 2 * win) throw ParamError("f4 needs at least two seconds of samples");

    const double mean = stats::mean(x);
    const double sd = stats::stddev(x);

    Signal win_means;
    Signal win_diff_stds;
    for (std::size_t start = 0; start + win <= n; start += win) {
        win_means.push_back(stats::mean(x.data() + start, win));
        Signal wd(win - 1);
        for (std::size_t i = 0; i + 1 < win; ++i) wd[i] = x[start + i + 1] - x[start + i];
        win_diff_stds.push_back(stats::stddev(wd));
    }
    const double win_mean_std = stats::stddev(win_means);
    double rms_win_diff = 0.0;
    for (std::size_t i = 0; i + 1 < win_means.size(); ++i) {
        const double d = win_means[i + 1] - win_means[i];
        rms_win_diff += d * d;
    }
    rms_win_diff = win_means.size() > 1
                       ? std::sqrt(rms_win_diff / static_cast<double>(win_means.size() - 1))
                       : 0.0;
    const double mean_win_diff_std = stats::mean(win_diff_stds);

    Signal diff(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) diff[i] = x[i + 1] - x[i];
    const double diff_std = stats::stddev(diff);

    Signal centered = x;
    for (double& v : centered) v -= mean;
    bool degenerate = false;
    const Signal ac = autocorr(centered, &degenerate);
    const double ac_mean = degenerate ? 0.0 : stats::mean(ac);

    // Shannon entropy of the 64-bin amplitude histogram
    double entropy = 0.0;
    const double lo = stats::min(x), hi = stats::max(x);
    if (hi > lo) {
        std::array<double, 64> hist{};
        for (double v : x) {
            const int bin = std::min(63, static_cast<int>((v - lo) / (hi - lo) * 64.0));
            hist[static_cast<std::size_t>(bin)] += 1.0;
        }
        for (double c : hist) {
            if (c > 0.0) {
                const double p = c / static_cast<double>(n);
                entropy -= p * std::log2(p);
            }
        }
    }
    return {mean, sd, win_mean_std, rms_win_diff, mean_win_diff_std, diff_std, ac_mean, entropy};
}

std::vector<double> f5_wavelet_feats(const Signal& x, int n, bool* padded) {
    if (n < 1) throw ParamError("f5 needs n >= 1");
    const auto coeffs = haar_decompose(x, 4).coefficients();
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(n), coeffs.size());
    std::copy(coeffs.begin(), coeffs.begin() + static_cast<std::ptrdiff_t>(take), out.begin());
    if (padded) *padded = take < static_cast<std::size_t>(n);
    return out;
}

std::vector<double> f6_lyapunov_feats(const Signal& x, int n) {
    return lyapunov_exponents(x, n).exponents;
}

std::array<double, 5> f7_modulation_feats(const Signal& x, bool* degenerate) {
    if (degenerate) *degenerate = false;
    const std::size_t n = x.size();
    if (n < 8) throw ParamError("f7 needs at least 8 samples");

    const auto z = analytic_signal(x);
    Signal amp(n);
    for (std::size_t i = 0; i < n; ++i) amp[i] = std::abs(z[i]);
    const double mu_a = stats::mean(amp);
    if (mu_a < 1e-12) {
        if (degenerate) *degenerate = true;
        return {0.0, 0.0, 0.0, 0.0, 0.0};
    }
    Signal acn(n);
    for (std::size_t i = 0; i < n; ++i) acn[i] = amp[i] / mu_a - 1.0;

    // gamma_max: peak of |DFT(a_cn)|^2 / n
    const auto spec = fft_real(acn);
    double gamma_max = 0.0;
    for (const auto& v : spec) gamma_max = std::max(gamma_max, std::norm(v));
    gamma_max /= static_cast<double>(n);

    // non-linear phase: unwrap, then remove the least-squares linear trend
    Signal phase(n);
    double prev = std::arg(z[0]);
    double offset = 0.0;
    phase[0] = prev;
    for (std::size_t i = 1; i < n; ++i) {
        const double cur = std::arg(z[i]);
        double d = cur - prev;
        while (d > std::numbers::pi) {
            offset -= 2.0 * std::numbers::pi;
            d -= 2.0 * std::numbers::pi;
        }
        while (d < -std::numbers::pi) {
            offset += 2.0 * std::numbers::pi;
            d += 2.0 * std::numbers::pi;
        }
        phase[i] = cur + offset;
        prev = cur;
    }
    double sk = 0.0, sy = 0.0, skk = 0.0, sky = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double k = static_cast<double>(i);
        sk += k;
        sy += phase[i];
        skk += k * k;
        sky += k * phase[i];
    }
    const double cnt = static_cast<double>(n);
    const double slope = (cnt * sky - sk * sy) / (cnt * skk - sk * sk);
    const double intercept = (sy - slope * sk) / cnt;
    Signal phi_nl(n), abs_phi(n), abs_acn(n);
    for (std::size_t i = 0; i < n; ++i) {
        phi_nl[i] = phase[i] - (intercept + slope * static_cast<double>(i));
        abs_phi[i] = std::abs(phi_nl[i]);
        abs_acn[i] = std::abs(acn[i]);
    }

    const double sigma_acn = stats::stddev(acn);
    double kurt = 0.0;
    if (sigma_acn > 1e-12) {
        double m4 = 0.0;
        const double m = stats::mean(acn);
        for (double v : acn) m4 += std::pow(v - m, 4);
        m4 /= cnt;
        kurt = m4 / std::pow(sigma_acn, 4);
    } else if (degenerate) {
        *degenerate = true;
    }
    return {gamma_max, stats::stddev(abs_phi), stats::stddev(phi_nl), stats::stddev(abs_acn),
            kurt};
}

std::array<double, 3> f8_band_powers(const Signal& x, double fps, const PpgConfig& cfg) {
    const Spectrum spec = welch_psd(x, fps, cfg);
    constexpr double kFloor = 1e-12;
    const std::array<std::pair<double, double>, 3> bands = {
        std::pair{1.0, 4.0}, std::pair{4.0, 8.0}, std::pair{8.0, 13.0}};
    std::array<double, 3> out{};
    for (std::size_t b = 0; b < bands.size(); ++b) {
        double acc = 0.0;
        for (std::size_t k = 0; k < spec.size(); ++k) {
            if (spec.freqs[k] >= bands[b].first && spec.freqs[k] < bands[b].second)
                acc += spec.power[k];
        }
        out[b] = std::log(acc + kFloor);
    }
    return out;
}

std::array<double, 3> f9_psd_shape(const Signal& x, double fps, const PpgConfig& cfg) {
    const Spectrum spec = welch_psd(x, fps, cfg);
    double hi_sum = 0.0;
    std::size_t hi_cnt = 0;
    for (std::size_t k = 0; k < spec.size(); ++k) {
        if (spec.freqs[k] > cfg.h_high) {
            hi_sum += spec.power[k];
            ++hi_cnt;
        }
    }
    const double hi_mean = hi_cnt > 0 ? hi_sum / static_cast<double>(hi_cnt) : 0.0;

    // least-squares slope of log10(power) against frequency
    double sk = 0.0, sy = 0.0, skk = 0.0, sky = 0.0;
    std::size_t cnt = 0;
    for (std::size_t k = 1; k < spec.size(); ++k) {
        const double logp = std::log10(spec.power[k] + 1e-12);
        sk += spec.freqs[k];
        sy += logp;
        skk += spec.freqs[k] * spec.freqs[k];
        sky += spec.freqs[k] * logp;
        ++cnt;
    }
    double slope = 0.0;
    if (cnt >= 2) {
        const double c = static_cast<double>(cnt);
        slope = (c * sky - sk * sy) / (c * skk - sk * sk);
    }

    const auto peaks = find_peaks(x);
    double ipd_var = 0.0;
    if (peaks.size() >= 2) {
        Signal gaps(peaks.size() - 1);
        for (std::size_t i = 0; i + 1 < peaks.size(); ++i)
            gaps[i] = static_cast<double>(peaks[i + 1].index - peaks[i].index);
        ipd_var = stats::variance(gaps);
    }
    return {hi_mean, slope, ipd_var};
}

// --- the canonical assembly --------------------------------------------------

namespace {

const Signal& bundle_signal(const SignalBundle& b, std::string_view name) {
    const auto& names = SignalBundle::s_names();
    const auto sigs = b.s();
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return *sigs[i];
    }
    throw ParamError("unknown signal name " + std::string(name));
}

Signal dc_signal(const SignalBundle& b, std::string_view name) {
    const auto& names = SignalBundle::d_c_names();
    auto dc = b.d_c();
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return std::move(dc[i]);
    }
    throw ParamError("unknown cross-region signal name " + std::string(name));
}

// input tokens: "log(G_L)", "Ap(DC_LM~DC_LR)", bare "G_L"
Signal resolve_input(const SignalBundle& b, const PpgConfig& cfg, std::string_view token) {
    if (token.rfind("log(", 0) == 0 && token.back() == ')') {
        const std::string_view inner = token.substr(4, token.size() - 5);
        if (inner.rfind("DC_", 0) == 0) return log_scale(dc_signal(b, inner));
        return log_scale(bundle_signal(b, inner));
    }
    if (token.rfind("Ap(", 0) == 0 && token.back() == ')') {
        const std::string_view inner = token.substr(3, token.size() - 4);
        const std::size_t tilde = inner.find('~');
        if (tilde == std::string_view::npos) throw ParamError("malformed pair token");
        const Signal lhs = dc_signal(b, inner.substr(0, tilde));
        const Signal rhs = dc_signal(b, inner.substr(tilde + 1));
        return welch_cross_psd(lhs, rhs, b.fps, cfg).power;
    }
    return bundle_signal(b, token);
}

constexpr std::array<std::string_view, 4> kF3Stats = {"pulses", "lines", "pulse_energy",
                                                      "max_sac"};
constexpr std::array<std::string_view, 8> kF4Stats = {
    "mean",              "std",      "winmean_std",   "winmean_rms_diff",
    "win_diff_std_mean", "diff_std", "autocorr_mean", "entropy"};

std::vector<std::string> nine_input_tokens() {
    std::vector<std::string> tokens;
    for (const auto& s : SignalBundle::s_names()) tokens.push_back("log(" + std::string(s) + ")");
    const auto& dc = SignalBundle::d_c_names();
    tokens.push_back("Ap(" + std::string(dc[0]) + "~" + std::string(dc[1]) + ")");
    tokens.push_back("Ap(" + std::string(dc[0]) + "~" + std::string(dc[2]) + ")");
    tokens.push_back("Ap(" + std::string(dc[1]) + "~" + std::string(dc[2]) + ")");
    return tokens;
}

}  // namespace

FeatureVector assemble_126(const SignalBundle& bundle, const PpgConfig& cfg) {
    bundle.validate();
    FeatureVector fv;
    fv.values.reserve(126);
    fv.names.reserve(126);

    auto emit = [&](std::string name, double value) {
        if (!std::isfinite(value)) value = 0.0;  // degenerate inputs stay finite
        fv.names.push_back(std::move(name));
        fv.values.push_back(value);
    };

    const auto& dc_names = SignalBundle::d_c_names();
    constexpr std::array<std::pair<std::size_t, std::size_t>, 3> kPairs = {
        std::pair{0UL, 1UL}, std::pair{0UL, 2UL}, std::pair{1UL, 2UL}};

    // F1 over pairs of log(D_C): 6 entries
    const auto dc = bundle.d_c();
    for (const auto& [i, j] : kPairs) {
        const std::string tag =
            "log(" + std::string(dc_names[i]) + ")~log(" + std::string(dc_names[j]) + ")";
        try {
            const auto v = f1_cross_psd_stats(log_scale(dc[i]), log_scale(dc[j]), bundle.fps, cfg);
            emit("F1|" + tag + "|mean", v[0]);
            emit("F1|" + tag + "|max", v[1]);
        } catch (const Error& e) {
            throw Error("F1|" + tag + ": " + e.what());
        }
    }

    const auto tokens = nine_input_tokens();
    // F3 over the nine inputs: 36 entries
    for (const auto& token : tokens) {
        try {
            const Signal input = resolve_input(bundle, cfg, token);
            const auto v = f3_spectral_autocorr_feats(input, bundle.fps, cfg);
            for (std::size_t s = 0; s < kF3Stats.size(); ++s)
                emit("F3|" + token + "|" + std::string(kF3Stats[s]), v[s]);
        } catch (const Error& e) {
            throw Error("F3|" + token + ": " + e.what());
        }
    }
    // F4 over the nine inputs: 72 entries
    for (const auto& token : tokens) {
        try {
            const Signal input = resolve_input(bundle, cfg, token);
            const auto v = f4_hrv_feats(input, bundle.fps);
            for (std::size_t s = 0; s < kF4Stats.size(); ++s)
                emit("F4|" + token + "|" + std::string(kF4Stats[s]), v[s]);
        } catch (const Error& e) {
            throw Error("F4|" + token + ": " + e.what());
        }
    }
    // spectral-autocorrelation summary of each signal in S: 12 entries
    for (const auto& sname : SignalBundle::s_names()) {
        try {
            const Signal sac = spectral_autocorr(bundle_signal(bundle, sname));
            emit("AHAT|" + std::string(sname) + "|mean", stats::mean(sac));
            emit("AHAT|" + std::string(sname) + "|max", stats::max(sac));
        } catch (const Error& e) {
            throw Error("AHAT|" + std::string(sname) + ": " + e.what());
        }
    }

    if (fv.size() != 126) throw Error("assembled vector is not 126 entries");
    fv.validate();
    return fv;
}

double recompute_feature(const std::string& name, const SignalBundle& bundle,
                         const PpgConfig& cfg) {
    const std::size_t bar1 = name.find('|');
    const std::size_t bar2 = name.rfind('|');
    if (bar1 == std::string::npos || bar2 == bar1) throw ParamError("malformed feature name");
    const std::string set = name.substr(0, bar1);
    const std::string input = name.substr(bar1 + 1, bar2 - bar1 - 1);
    const std::string stat = name.substr(bar2 + 1);

    auto finite = [](double v) { return std::isfinite(v) ? v : 0.0; };

    if (set == "F1") {
        const std::size_t split = input.find(")~log(");
        if (split == std::string::npos) throw ParamError("malformed F1 input " + input);
        const std::string lhs = input.substr(0, split + 1);
        const std::string rhs = input.substr(split + 2);
        const Signal a = resolve_input(bundle, cfg, lhs);
        const Signal b = resolve_input(bundle, cfg, rhs);
        const auto v = f1_cross_psd_stats(a, b, bundle.fps, cfg);
        return finite(stat == "mean" ? v[0] : v[1]);
    }
    if (set == "F3") {
        const auto v =
            f3_spectral_autocorr_feats(resolve_input(bundle, cfg, input), bundle.fps, cfg);
        for (std::size_t s = 0; s < kF3Stats.size(); ++s) {
            if (kF3Stats[s] == stat) return finite(v[s]);
        }
        throw ParamError("unknown F3 statistic " + stat);
    }
    if (set == "F4") {
        const auto v = f4_hrv_feats(resolve_input(bundle, cfg, input), bundle.fps);
        for (std::size_t s = 0; s < kF4Stats.size(); ++s) {
            if (kF4Stats[s] == stat) return finite(v[s]);
        }
        throw ParamError("unknown F4 statistic " + stat);
    }
    if (set == "AHAT") {
        const Signal sac = spectral_autocorr(bundle_signal(bundle, input));
        return finite(stat == "mean" ? stats::mean(sac) : stats::max(sac));
    }
    throw ParamError("unknown feature set " + set);
}

// --- normalization -------------------------------------------------------------

NormMethod norm_from_name(std::string_view name) {
    if (name == "none") return NormMethod::none;
    if (name == "l2" || name == "2-norm") return NormMethod::l2;
    if (name == "linf" || name == "inf-norm") return NormMethod::linf;
    if (name == "zscore" || name == "standardized-moment") return NormMethod::zscore;
    if (name == "minmax" || name == "feature-scaling") return NormMethod::minmax;
    if (name == "whiten" || name == "spectral-whitening") return NormMethod::spectral_whitening;
    if (name == "cv" || name == "coefficient-of-variation") return NormMethod::coeff_variation;
    throw ParamError("unknown normalization: " + std::string(name));
}

std::string_view norm_name(NormMethod m) {
    switch (m) {
        case NormMethod::none: return "none";
        case NormMethod::l2: return "2-norm";
        case NormMethod::linf: return "inf-norm";
        case NormMethod::zscore: return "standardized-moment";
        case NormMethod::minmax: return "feature-scaling";
        case NormMethod::spectral_whitening: return "spectral-whitening";
        case NormMethod::coeff_variation: return "coefficient-of-variation";
    }
    return "?";
}

Signal normalize(const Signal& x, NormMethod m) {
    const std::size_t n = x.size();
    if (n == 0) return {};
    Signal out = x;
    switch (m) {
        case NormMethod::none: return out;
        case NormMethod::l2: {
            const double norm = std::sqrt(kernels::sumsq(x.data(), n));
            if (norm > 0.0) kernels::scale(1.0 / norm, out.data(), n);
            return out;
        }
        case NormMethod::linf: {
            double mx = 0.0;
            for (double v : x) mx = std::max(mx, std::abs(v));
            if (mx > 0.0) kernels::scale(1.0 / mx, out.data(), n);
            return out;
        }
        case NormMethod::zscore: {
            const double mu = stats::mean(x);
            const double sd = stats::stddev(x);
            for (double& v : out) v = sd > 0.0 ? (v - mu) / sd : 0.0;
            return out;
        }
        case NormMethod::minmax: {
            const double lo = stats::min(x), hi = stats::max(x);
            for (double& v : out) v = hi > lo ? (v - lo) / (hi - lo) : 0.0;
            return out;
        }
        case NormMethod::spectral_whitening: {
            auto spec = fft_real(x);
            for (auto& v : spec) {
                const double mag = std::abs(v);
                if (mag > 1e-12) v /= mag;
            }
            const auto back = ifft(std::move(spec));
            for (std::size_t i = 0; i < n; ++i) out[i] = back[i].real();
            return out;
        }
        case NormMethod::coeff_variation: {
            const double mu = stats::mean(x);
            for (double& v : out) v = std::abs(mu) > 1e-12 ? v / mu : 0.0;
            return out;
        }
    }
    return out;
}

}  // namespace fc
