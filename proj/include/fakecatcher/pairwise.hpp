#pragma once

#include <optional>

#include "fakecatcher/rppg.hpp"

namespace fc {

enum class PairMetric { stat, absdiff, psd_eq1, dct_dc, xpsd_mean, xpsd_log, ap_log };

std::string_view pair_metric_name(PairMetric m);
PairMetric pair_metric_from_name(std::string_view name);

struct PairMetricOptions {
    PpgConfig ppg;
    int dct_n = 0;  // dct_dc: cumulative AC terms added to the DC value
    // ap_log: optional frequency gate [lo, hi] (Hz) over the cross spectra
    std::optional<std::pair<double, double>> band;
};

// Raw per-segment score. Polarity is normalized so that a HIGHER score means
// "more synthetic": variability metrics score up, coherence metrics score
// negated.
double pair_metric_score(PairMetric m, const SignalBundle& bundle,
                         const PairMetricOptions& opts = {});

struct PairScore {
    PairMetric metric;
    double score_a = 0.0;  // suspicion per member
    double score_b = 0.0;
    int fake_index = -1;  // 0 = a, 1 = b
    bool undecidable = false;
};

PairScore metric_stat(const SignalBundle& a, const SignalBundle& b,
                      const PairMetricOptions& opts = {});
PairScore metric_absdiff(const SignalBundle& a, const SignalBundle& b,
                         const PairMetricOptions& opts = {});
PairScore metric_psd_eq1(const SignalBundle& a, const SignalBundle& b,
                         const PairMetricOptions& opts = {});
PairScore metric_dct_dc(const SignalBundle& a, const SignalBundle& b,
                        const PairMetricOptions& opts = {});
PairScore metric_ap_log(const SignalBundle& a, const SignalBundle& b,
                        const PairMetricOptions& opts = {});

struct PairDecision {
    PairMetric metric;
    int fake_index = -1;
    bool undecidable = false;
    double score_a = 0.0;  // segment-mean suspicion
    double score_b = 0.0;
    std::vector<double> segment_scores_a;
    std::vector<double> segment_scores_b;
};

// Video-level decision: per-segment suspicion scores averaged per member,
// the higher mean is called synthetic.
PairDecision pairwise_separate(const std::vector<SignalBundle>& video_a,
                               const std::vector<SignalBundle>& video_b, PairMetric metric,
                               const PairMetricOptions& opts = {});

}  // namespace fc
