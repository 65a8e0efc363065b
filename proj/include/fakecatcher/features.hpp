#pragma once

#include <string>

#include "fakecatcher/rppg.hpp"
#include "fakecatcher/transforms.hpp"

namespace fc {

struct FeatureVector {
    std::vector<double> values;
    std::vector<std::string> names;

    std::size_t size() const { return values.size(); }
    void validate() const;  // finite values, unique names, parallel arrays
};

struct Peak {
    std::size_t index;
    double prominence;
    double width;  // samples at half prominence
};

// Local maxima with prominence at least `min_prominence_frac` of the signal
// range.
std::vector<Peak> find_peaks(const Signal& x, double min_prominence_frac = 0.05);

// F1: mean and maximum of the cross spectral density of one pair.
std::array<double, 2> f1_cross_psd_stats(const Signal& a, const Signal& b, double fps,
                                         const PpgConfig& cfg = {});

// F2: thirteen time/frequency statistics in a fixed order: RMS of
// differences, std, mean |diff|, ratio of negative diffs, zero-crossing
// rate, mean/std peak prominence, mean/std peak width, max/min/mean
// derivative, spectral centroid.
std::array<double, 13> f2_stats(const Signal& x, double fps, const PpgConfig& cfg = {});

// F3: narrow-pulse and spectral-line counts of the spectral autocorrelation:
// [#pulses, #lines, mean pulse energy, max of the spectral autocorrelation
// beyond lag 0].
std::array<double, 4> f3_spectral_autocorr_feats(const Signal& x, double fps,
                                                 const PpgConfig& cfg = {});

// F4: [mean, std, std of 1-s window means, RMS of 1-s window-mean diffs,
// mean of per-window std of successive diffs, std of successive diffs,
// mean autocorrelation (mean-removed), Shannon entropy of a 64-bin
// amplitude histogram in bits].
std::array<double, 8> f4_hrv_feats(const Signal& x, double fps);

// F5: first n wavelet coefficients in level-major order.
std::vector<double> f5_wavelet_feats(const Signal& x, int n = 65, bool* padded = nullptr);

// F6: largest n Lyapunov exponents.
std::vector<double> f6_lyapunov_feats(const Signal& x, int n = 100);

// F7: modulation statistics of the analytic signal: [gamma_max, std |phi_NL|,
// std phi_NL, std |a_cn|, kurtosis of a_cn].
std::array<double, 5> f7_modulation_feats(const Signal& x, bool* degenerate = nullptr);

// F8: log band powers of the delta (1-4 Hz), theta (4-8 Hz) and alpha
// (8-13 Hz) bands.
std::array<double, 3> f8_band_powers(const Signal& x, double fps, const PpgConfig& cfg = {});

// F9: [mean PSD amplitude above h_high, least-squares slope of the log-PSD,
// variance of inter-peak distances].
std::array<double, 3> f9_psd_shape(const Signal& x, double fps, const PpgConfig& cfg = {});

// The canonical 126-entry authenticity vector:
//   F1 over pairs of log(D_C)            -> 6
//   F3 over log(S) and Ap(D_C) pairs     -> 36
//   F4 over the same nine inputs         -> 72
//   mean and max of the spectral autocorrelation of each signal in S -> 12
// Names follow "<set>|<input>|<stat>" and decode via recompute_feature.
FeatureVector assemble_126(const SignalBundle& bundle, const PpgConfig& cfg = {});

// Recomputes a single assembled entry from its name.
double recompute_feature(const std::string& name, const SignalBundle& bundle,
                         const PpgConfig& cfg = {});

enum class NormMethod { none, l2, linf, zscore, minmax, spectral_whitening, coeff_variation };

NormMethod norm_from_name(std::string_view name);
std::string_view norm_name(NormMethod m);
Signal normalize(const Signal& x, NormMethod m);

}  // namespace fc
