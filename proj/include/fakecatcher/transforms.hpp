#pragma once

#include "fakecatcher/common.hpp"
#include "fakecatcher/rppg.hpp"

namespace fc {

enum class TransformId { A, A_hat, phi, P, A_p, L, X_dct, W_wavelet, Y_lyapunov };

// Biased normalized autocorrelation over lags 0..n-1; lag-0 value is 1 for a
// nonzero input. An all-zero input yields an all-zero output (flagged).
Signal autocorr(const Signal& x, bool* degenerate = nullptr);

// Autocorrelation of the one-sided magnitude spectrum of x.
Signal spectral_autocorr(const Signal& x, bool* degenerate = nullptr);

// Normalized cross-correlation over lags -(n-1)..(n-1).
struct CrossCorr {
    Signal values;  // index i corresponds to lag i - (n-1)
    int min_lag = 0;

    int lag_at(std::size_t i) const { return min_lag + static_cast<int>(i); }
    int argmax_lag() const;
    double max_value() const;
    double max_abs() const;
};
CrossCorr xcorr(const Signal& x, const Signal& y);

// Power spectral density (Welch).
Spectrum psd(const Signal& x, double fps, const PpgConfig& cfg = {});
// Magnitude of the cross power spectral density of one pair.
Spectrum cross_psd(const Signal& x, const Signal& y, double fps, const PpgConfig& cfg = {});

// log(1 + |x|) per element.
Signal log_scale(const Signal& x);

// Orthonormal DCT-II. Parseval holds: ||x||^2 == ||dct(x)||^2.
Signal dct(const Signal& x);

// Multi-level orthonormal Haar decomposition. Inputs whose length is not a
// multiple of 2^levels are zero-padded (flagged).
struct WaveletDecomp {
    Signal approx;                // coarsest approximation
    std::vector<Signal> details;  // details[0] = coarsest level ... back() = finest
    int levels = 0;
    std::size_t padded_length = 0;
    std::size_t original_length = 0;
    bool padded = false;

    // level-major: approximation first, then details coarse-to-fine
    Signal coefficients() const;
};
WaveletDecomp haar_decompose(const Signal& x, int levels = 4);
Signal haar_reconstruct(const WaveletDecomp& d);

struct LyapunovParams {
    int embed_dim = 5;
    int delay = 2;
    int theiler = 10;
    int horizon = 40;     // divergence-curve length (samples)
    int fit_window = 6;   // sliding-slope window over the divergence curve
};

struct LyapunovResult {
    std::vector<double> exponents;  // descending; zero-padded when fewer are available
    bool degenerate = false;
};

// Largest Lyapunov exponents estimated from the mean log-divergence curve of
// delay-embedded nearest-neighbor pairs. Exponents are per-sample slopes of
// that curve over sliding windows, sorted descending.
LyapunovResult lyapunov_exponents(const Signal& x, int n, const LyapunovParams& params = {});

}  // namespace fc
