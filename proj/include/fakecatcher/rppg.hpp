#pragma once

#include <array>
#include <filesystem>

#include "fakecatcher/common.hpp"
#include "fakecatcher/trace.hpp"

namespace fc {

struct PpgConfig {
    double band_low = 0.7;    // Hz
    double band_high = 14.0;  // Hz
    int filter_order = 4;     // prototype order; the band-pass has 2x poles
    int welch_bins = 256;     // one-sided frequency bins, power of two
    int welch_window = 128;   // analysis window cap (samples)
    double h_low = 0.67;      // heart-band markers, optional gating only
    double h_high = 4.68;

    void validate(double fps) const;
};

// Second-order section, direct form II transposed.
struct Biquad {
    double b0, b1, b2;
    double a1, a2;
};

// Digital Butterworth band-pass as a biquad cascade (bilinear transform of
// the analog prototype). Gain is folded into the first section.
std::vector<Biquad> design_butter_bandpass(int order, double low_hz, double high_hz, double fps);

Signal sosfilt(const std::vector<Biquad>& sos, const Signal& x);
// Zero-phase forward-backward filtering with odd-reflection padding.
Signal filtfilt(const std::vector<Biquad>& sos, const Signal& x);

Signal butterworth_bandpass(const Signal& x, double fps, const PpgConfig& cfg = {});

// Green-channel PPG: mean-removed, band-passed green trace.
Signal gppg(const RegionTrace& trace, const PpgConfig& cfg = {});

// Chrominance PPG: per-channel temporal-mean normalization, fixed-coefficient
// chroma projections, band-pass, then X_f - alpha * Y_f with
// alpha = std(X_f)/std(Y_f). A vanishing Y_f falls back to X_f and flags.
Signal chrom_ppg(const RegionTrace& trace, const PpgConfig& cfg = {}, bool* degenerate = nullptr);

// Averaged modified periodograms (Hann window, 50% overlap, per-window mean
// removal). Returns welch_bins frequencies covering [0, fps/2).
Spectrum welch_psd(const Signal& x, double fps, const PpgConfig& cfg = {});
// Magnitude of the Welch cross spectral density; welch_cross_psd(x,x) equals
// welch_psd(x).
Spectrum welch_cross_psd(const Signal& x, const Signal& y, double fps, const PpgConfig& cfg = {});

// The six signals of one segment plus the derived sets.
struct SignalBundle {
    Signal g_left, g_right, g_mid;
    Signal c_left, c_right, c_mid;
    double fps = 30.0;

    std::size_t omega() const { return g_left.size(); }
    // S = {G_L, G_R, G_M, C_L, C_R, C_M}
    std::array<const Signal*, 6> s() const;
    static const std::array<std::string_view, 6>& s_names();
    // S_C = {C_L, C_R, C_M}
    std::array<const Signal*, 3> s_c() const;
    static const std::array<std::string_view, 3>& s_c_names();
    // D = {|C_L-G_L|, |C_R-G_R|, |C_M-G_M|}
    std::array<Signal, 3> d() const;
    // D_C = {|C_L-C_M|, |C_L-C_R|, |C_R-C_M|}
    std::array<Signal, 3> d_c() const;
    static const std::array<std::string_view, 3>& d_c_names();

    void validate() const;
};

SignalBundle build_bundle(const RegionTrace& left, const RegionTrace& mid, const RegionTrace& right,
                          const PpgConfig& cfg = {});

// CSV dump t,G_L,G_M,G_R,C_L,C_M,C_R plus a sidecar JSON of the config.
void write_signal_dump(const std::filesystem::path& csv_path, const SignalBundle& bundle);
void write_ppg_config_json(const std::filesystem::path& path, const PpgConfig& cfg, double fps);

}  // namespace fc
