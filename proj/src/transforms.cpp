#include "fakecatcher/transforms.hpp"

#include <cstdlib>
#include <limits>
#include <numbers>

#include "fakecatcher/fft.hpp"
#include "fakecatcher/kernels.hpp"

namespace fc {

namespace {

constexpr double kPi = std::numbers::pi;

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace

Signal autocorr(const Signal& x, bool* degenerate) {
    if (degenerate) *degenerate = false;
    const std::size_t n = x.size();
    if (n < 2) throw ParamError("autocorrelation needs at least 2 samples");
    const double energy = kernels::sumsq(x.data(), n);
    if (energy == 0.0) {
        if (degenerate) *degenerate = true;
        return Signal(n, 0.0);
    }
    // Wiener-Khinchin with zero padding
    const std::size_t m = next_pow2(2 * n);
    std::vector<cplx> buf(m, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < n; ++i) buf[i] = cplx(x[i], 0.0);
    buf = fft(std::move(buf));
    for (auto& v : buf) v = cplx(std::norm(v), 0.0);
    buf = ifft(std::move(buf));
    Signal r(n);
    const double inv = 1.0 / buf[0].real();
    for (std::size_t k = 0; k < n; ++k) r[k] = buf[k].real() * inv;
    return r;
}

Signal spectral_autocorr(const Signal& x, bool* degenerate) {
    const std::size_t n = x.size();
    if (n < 4) throw ParamError("spectral autocorrelation needs at least 4 samples");
    auto spec = fft_real(x);
    Signal mag(n / 2 + 1);
    for (std::size_t k = 0; k < mag.size(); ++k) mag[k] = std::abs(spec[k]);
    return autocorr(mag, degenerate);
}

int CrossCorr::argmax_lag() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) best = i;
    }
    return lag_at(best);
}

double CrossCorr::max_value() const {
    if (values.empty()) throw ParamError("empty cross-correlation");
    return *std::max_element(values.begin(), values.end());
}

double CrossCorr::max_abs() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

CrossCorr xcorr(const Signal& x, const Signal& y) {
    if (x.size() != y.size()) throw ParamError("cross-correlation length mismatch");
    const std::size_t n = x.size();
    if (n < 2) throw ParamError("cross-correlation needs at least 2 samples");
    const double ex = kernels::sumsq(x.data(), n);
    const double ey = kernels::sumsq(y.data(), n);
    const double denom = std::sqrt(ex * ey);

    const std::size_t m = next_pow2(2 * n);
    std::vector<cplx> fx(m, cplx(0.0, 0.0)), fy(m, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        fx[i] = cplx(x[i], 0.0);
        fy[i] = cplx(y[i], 0.0);
    }
    fx = fft(std::move(fx));
    fy = fft(std::move(fy));
    for (std::size_t i = 0; i < m; ++i) fx[i] = std::conj(fx[i]) * fy[i];
    fx = ifft(std::move(fx));

    CrossCorr out;
    out.min_lag = -static_cast<int>(n) + 1;
    out.values.resize(2 * n - 1);
    const double inv = denom > 0.0 ? 1.0 / denom : 0.0;
    // c[lag] = sum_t x[t] * y[t+lag]; negative lags wrap around
    for (std::size_t i = 0; i < 2 * n - 1; ++i) {
        const int lag = out.min_lag + static_cast<int>(i);
        const std::size_t idx = lag >= 0 ? static_cast<std::size_t>(lag)
                                         : m - static_cast<std::size_t>(-lag);
        out.values[i] = fx[idx].real() * inv;
    }
    return out;
}

Spectrum psd(const Signal& x, double fps, const PpgConfig& cfg) {
    return welch_psd(x, fps, cfg);
}

Spectrum cross_psd(const Signal& x, const Signal& y, double fps, const PpgConfig& cfg) {
    return welch_cross_psd(x, y, fps, cfg);
}

Signal log_scale(const Signal& x) {
    Signal out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::log1p(std::abs(x[i]));
    return out;
}

Signal dct(const Signal& x) {
    const std::size_t n = x.size();
    if (n == 0) return {};
    if (n == 1) return {x[0]};
    // even-odd permutation, then a same-length FFT with a quarter-sample
    // phase twist
    std::vector<cplx> v(n, cplx(0.0, 0.0));
    for (std::size_t i = 0; 2 * i < n; ++i) v[i] = cplx(x[2 * i], 0.0);
    for (std::size_t i = 0; 2 * i + 1 < n; ++i) v[n - 1 - i] = cplx(x[2 * i + 1], 0.0);
    v = fft(std::move(v));
    Signal out(n);
    const double s0 = std::sqrt(1.0 / static_cast<double>(n));
    const double sk = std::sqrt(2.0 / static_cast<double>(n));
    for (std::size_t k = 0; k < n; ++k) {
        const double ang = -kPi * static_cast<double>(k) / (2.0 * static_cast<double>(n));
        const cplx tw(std::cos(ang), std::sin(ang));
        const double raw = (v[k] * tw).real();
        out[k] = raw * (k == 0 ? s0 : sk);
    }
    return out;
}

WaveletDecomp haar_decompose(const Signal& x, int levels) {
    if (levels < 1) throw ParamError("wavelet levels must be >= 1");
    if (x.empty()) throw ParamError("wavelet input is empty");
    const std::size_t block = static_cast<std::size_t>(1) << levels;
    WaveletDecomp d;
    d.levels = levels;
    d.original_length = x.size();
    std::size_t padded = ((x.size() + block - 1) / block) * block;
    d.padded = padded != x.size();
    d.padded_length = padded;

    Signal cur = x;
    cur.resize(padded, 0.0);
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    d.details.resize(static_cast<std::size_t>(levels));
    for (int lv = 0; lv < levels; ++lv) {
        const std::size_t half = cur.size() / 2;
        Signal approx(half), detail(half);
        for (std::size_t i = 0; i < half; ++i) {
            approx[i] = (cur[2 * i] + cur[2 * i + 1]) * inv_sqrt2;
            detail[i] = (cur[2 * i] - cur[2 * i + 1]) * inv_sqrt2;
        }
        // details stored coarse-to-fine: the last computed level is coarsest
        d.details[static_cast<std::size_t>(levels - 1 - lv)] = std::move(detail);
        cur = std::move(approx);
    }
    d.approx = std::move(cur);
    return d;
}

Signal haar_reconstruct(const WaveletDecomp& d) {
    Signal cur = d.approx;
    const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
    for (const Signal& detail : d.details) {
        if (detail.size() != cur.size()) throw ParamError("inconsistent wavelet decomposition");
        Signal next(cur.size() * 2);
        for (std::size_t i = 0; i < cur.size(); ++i) {
            next[2 * i] = (cur[i] + detail[i]) * inv_sqrt2;
            next[2 * i + 1] = (cur[i] - detail[i]) * inv_sqrt2;
        }
        cur = std::move(next);
    }
    cur.resize(d.original_length);
    return cur;
}

Signal WaveletDecomp::coefficients() const {
    Signal out;
    out.reserve(padded_length);
    out.insert(out.end(), approx.begin(), approx.end());
    for (const Signal& detail : details) out.insert(out.end(), detail.begin(), detail.end());
    return out;
}

LyapunovResult lyapunov_exponents(const Signal& x, int n, const LyapunovParams& p) {
    if (n < 1) throw ParamError("need n >= 1 exponents");
    const int dim = p.embed_dim;
    const int tau = p.delay;
    const std::size_t len = x.size();
    const std::size_t span = static_cast<std::size_t>((dim - 1) * tau);
    if (len < span + 2 + static_cast<std::size_t>(p.theiler))
        throw ParamError("signal too short for delay embedding");
    const std::size_t m = len - span;  // embedded point count

    LyapunovResult res;
    const double rng = stats::max(x) - stats::min(x);
    if (rng == 0.0) {
        res.degenerate = true;
        res.exponents.assign(static_cast<std::size_t>(n), 0.0);
        return res;
    }

    auto dist2 = [&](std::size_t i, std::size_t j) {
        double acc = 0.0;
        for (int d = 0; d < dim; ++d) {
            const double diff = x[i + static_cast<std::size_t>(d * tau)] -
                                x[j + static_cast<std::size_t>(d * tau)];
            acc += diff * diff;
        }
        return acc;
    };

    // nearest neighbor outside the Theiler exclusion window
    std::vector<std::size_t> nn(m);
    std::vector<bool> has_nn(m, false);
    for (std::size_t i = 0; i < m; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < m; ++j) {
            const long gap = std::labs(static_cast<long>(i) - static_cast<long>(j));
            if (gap <= p.theiler) continue;
            const double d2 = dist2(i, j);
            if (d2 > 0.0 && d2 < best) {
                best = d2;
                nn[i] = j;
                has_nn[i] = true;
            }
        }
    }

    // mean log-divergence curve
    const int horizon = std::min<int>(p.horizon, static_cast<int>(m) - 1);
    std::vector<double> curve;
    curve.reserve(static_cast<std::size_t>(horizon) + 1);
    for (int k = 0; k <= horizon; ++k) {
        double acc = 0.0;
        std::size_t cnt = 0;
        for (std::size_t i = 0; i < m; ++i) {
            if (!has_nn[i]) continue;
            const std::size_t j = nn[i];
            if (i + static_cast<std::size_t>(k) >= m || j + static_cast<std::size_t>(k) >= m)
                continue;
            const double d2 = dist2(i + static_cast<std::size_t>(k), j + static_cast<std::size_t>(k));
            if (d2 <= 0.0) continue;
            acc += 0.5 * std::log(d2);
            ++cnt;
        }
        if (cnt == 0) break;
        curve.push_back(acc / static_cast<double>(cnt));
    }
    if (curve.size() < static_cast<std::size_t>(p.fit_window) + 1) {
        res.degenerate = true;
        res.exponents.assign(static_cast<std::size_t>(n), 0.0);
        return res;
    }

    // per-sample slopes of the divergence curve over sliding windows
    const std::size_t w = static_cast<std::size_t>(p.fit_window);
    std::vector<double> slopes;
    for (std::size_t s = 0; s + w < curve.size(); ++s) {
        // least squares slope over curve[s .. s+w]
        const double cnt = static_cast<double>(w + 1);
        double sk = 0.0, sy = 0.0, skk = 0.0, sky = 0.0;
        for (std::size_t t = 0; t <= w; ++t) {
            const double k = static_cast<double>(t);
            sk += k;
            sy += curve[s + t];
            skk += k * k;
            sky += k * curve[s + t];
        }
        const double denom = cnt * skk - sk * sk;
        slopes.push_back((cnt * sky - sk * sy) / denom);
    }
    std::sort(slopes.rbegin(), slopes.rend());
    res.exponents.assign(static_cast<std::size_t>(n), 0.0);
    for (std::size_t i = 0; i < res.exponents.size() && i < slopes.size(); ++i)
        res.exponents[i] = slopes[i];
    return res;
}

}  // namespace fc
