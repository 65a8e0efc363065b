#include "fakecatcher/pairwise.hpp"

#include "fakecatcher/transforms.hpp"

namespace fc {

std::string_view pair_metric_name(PairMetric m) {
    switch (m) {
        case PairMetric::stat: return "stat";
        case PairMetric::absdiff: return "absdiff";
        case PairMetric::psd_eq1: return "psd-eq1";
        case PairMetric::dct_dc: return "dct-dc";
        case PairMetric::xpsd_mean: return "xpsd-mean";
        case PairMetric::xpsd_log: return "xpsd-log";
        case PairMetric::ap_log: return "ap-log";
    }
    return "?";
}

PairMetric pair_metric_from_name(std::string_view name) {
    if (name == "stat") return PairMetric::stat;
    if (name == "absdiff") return PairMetric::absdiff;
    if (name == "psd-eq1" || name == "psd_eq1") return PairMetric::psd_eq1;
    if (name == "dct-dc" || name == "dct_dc") return PairMetric::dct_dc;
    if (name == "xpsd-mean") return PairMetric::xpsd_mean;
    if (name == "xpsd-log") return PairMetric::xpsd_log;
    if (name == "ap-log" || name == "ap_log") return PairMetric::ap_log;
    throw ParamError("unknown pairwise metric: " + std::string(name));
}

namespace {

double range_of(const Signal& x) { return stats::max(x) - stats::min(x); }

double mean_abs_diff(const Signal& x) {
    if (x.size() < 2) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) acc += std::abs(x[i + 1] - x[i]);
    return acc / static_cast<double>(x.size() - 1);
}

double band_mean(const Spectrum& spec, const std::optional<std::pair<double, double>>& band) {
    double acc = 0.0;
    std::size_t cnt = 0;
    for (std::size_t k = 0; k < spec.size(); ++k) {
        if (band && (spec.freqs[k] < band->first || spec.freqs[k] > band->second)) continue;
        acc += spec.power[k];
        ++cnt;
    }
    return cnt > 0 ? acc / static_cast<double>(cnt) : 0.0;
}

}  // namespace

double pair_metric_score(PairMetric m, const SignalBundle& b, const PairMetricOptions& opts) {
    switch (m) {
        case PairMetric::stat: {
            // temporal variability of the mid-region signals; the band-pass
            // removes the means, so spread and range carry the information
            return stats::stddev(b.g_mid) + stats::stddev(b.c_mid) +
                   0.25 * (range_of(b.g_mid) + range_of(b.c_mid));
        }
        case PairMetric::absdiff:
            return mean_abs_diff(b.g_mid) + mean_abs_diff(b.c_mid);
        case PairMetric::psd_eq1: {
            // authentic spectra carry the stronger concentrated peak
            const Spectrum spec = welch_psd(b.g_left, b.fps, opts.ppg);
            return -(stats::mean(spec.power) + stats::stddev(spec.power));
        }
        case PairMetric::dct_dc: {
            const Signal coeffs = dct(log_scale(b.c_mid));
            double acc = coeffs[0];
            for (int k = 1; k <= opts.dct_n && k < static_cast<int>(coeffs.size()); ++k)
                acc += coeffs[static_cast<std::size_t>(k)];
            return acc;
        }
        case PairMetric::xpsd_mean: {
            const Spectrum pm = welch_psd(b.c_mid, b.fps, opts.ppg);
            const Spectrum pl = welch_psd(b.c_left, b.fps, opts.ppg);
            const auto cc = xcorr(pm.power, pl.power);
            return -stats::mean(cc.values);
        }
        case PairMetric::xpsd_log: {
            const Spectrum pm = welch_psd(b.c_mid, b.fps, opts.ppg);
            const Spectrum pl = welch_psd(b.c_left, b.fps, opts.ppg);
            const auto cc = xcorr(log_scale(pm.power), log_scale(pl.power));
            return -stats::mean(cc.values);
        }
        case PairMetric::ap_log: {
            // mean cross spectral density over the log-scaled chrominance
            // pairs; spatial coherence scores authentic
            const auto sc = b.s_c();
            double acc = 0.0;
            int pairs = 0;
            for (std::size_t i = 0; i < sc.size(); ++i) {
                for (std::size_t j = i + 1; j < sc.size(); ++j) {
                    const Spectrum spec = welch_cross_psd(log_scale(*sc[i]), log_scale(*sc[j]),
                                                          b.fps, opts.ppg);
                    acc += band_mean(spec, opts.band);
                    ++pairs;
                }
            }
            return -acc / pairs;
        }
    }
    throw ParamError("unknown pairwise metric");
}

namespace {

PairScore score_pair(PairMetric m, const SignalBundle& a, const SignalBundle& b,
                     const PairMetricOptions& opts) {
    PairScore out;
    out.metric = m;
    out.score_a = pair_metric_score(m, a, opts);
    out.score_b = pair_metric_score(m, b, opts);
    if (out.score_a == out.score_b) {
        out.undecidable = true;
    } else {
        out.fake_index = out.score_a > out.score_b ? 0 : 1;
    }
    return out;
}

}  // namespace

PairScore metric_stat(const SignalBundle& a, const SignalBundle& b,
                      const PairMetricOptions& opts) {
    return score_pair(PairMetric::stat, a, b, opts);
}
PairScore metric_absdiff(const SignalBundle& a, const SignalBundle& b,
                         const PairMetricOptions& opts) {
    return score_pair(PairMetric::absdiff, a, b, opts);
}
PairScore metric_psd_eq1(const SignalBundle& a, const SignalBundle& b,
                         const PairMetricOptions& opts) {
    return score_pair(PairMetric::psd_eq1, a, b, opts);
}
PairScore metric_dct_dc(const SignalBundle& a, const SignalBundle& b,
                        const PairMetricOptions& opts) {
    return score_pair(PairMetric::dct_dc, a, b, opts);
}
PairScore metric_ap_log(const SignalBundle& a, const SignalBundle& b,
                        const PairMetricOptions& opts) {
    return score_pair(PairMetric::ap_log, a, b, opts);
}

PairDecision pairwise_separate(const std::vector<SignalBundle>& video_a,
                               const std::vector<SignalBundle>& video_b, PairMetric metric,
                               const PairMetricOptions& opts) {
    if (video_a.empty() || video_b.empty())
        throw ParamError("pairwise separation needs segments on both sides");
    PairDecision out;
    out.metric = metric;
    for (const SignalBundle& seg : video_a)
        out.segment_scores_a.push_back(pair_metric_score(metric, seg, opts));
    for (const SignalBundle& seg : video_b)
        out.segment_scores_b.push_back(pair_metric_score(metric, seg, opts));
    out.score_a = stats::mean(out.segment_scores_a);
    out.score_b = stats::mean(out.segment_scores_b);
    if (out.score_a == out.score_b) {
        out.undecidable = true;
    } else {
        out.fake_index = out.score_a > out.score_b ? 0 : 1;
    }
    return out;
}

}  // namespace fc
