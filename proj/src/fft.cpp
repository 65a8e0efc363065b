#include "fakecatcher/fft.hpp"

#include <numbers>

namespace fc {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// In-place iterative radix-2 Cooley-Tukey. n must be a power of two.
void fft_pow2(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * kPi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        const cplx wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cplx w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cplx u = a[i + k];
                const cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

// Bluestein's algorithm: DFT of arbitrary length via a power-of-two
// convolution with the quadratic chirp.
std::vector<cplx> fft_bluestein(const std::vector<cplx>& x, bool inverse) {
    const std::size_t n = x.size();
    const double sign = inverse ? 1.0 : -1.0;
    std::vector<cplx> chirp(n);
    for (std::size_t k = 0; k < n; ++k) {
        // k^2 mod 2n keeps the angle argument small for large k
        const std::size_t k2 = (k * k) % (2 * n);
        const double ang = sign * kPi * static_cast<double>(k2) / static_cast<double>(n);
        chirp[k] = cplx(std::cos(ang), std::sin(ang));
    }
    const std::size_t m = next_pow2(2 * n - 1);
    std::vector<cplx> a(m, cplx(0.0, 0.0));
    std::vector<cplx> b(m, cplx(0.0, 0.0));
    for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * chirp[k];
    for (std::size_t k = 0; k < n; ++k) {
        b[k] = std::conj(chirp[k]);
        if (k != 0) b[m - k] = std::conj(chirp[k]);
    }
    fft_pow2(a, false);
    fft_pow2(b, false);
    for (std::size_t k = 0; k < m; ++k) a[k] *= b[k];
    fft_pow2(a, true);
    std::vector<cplx> out(n);
    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * inv_m * chirp[k];
    return out;
}

}  // namespace

std::vector<cplx> fft(std::vector<cplx> x) {
    if (x.empty()) return x;
    if (is_pow2(x.size())) {
        fft_pow2(x, false);
        return x;
    }
    return fft_bluestein(x, false);
}

std::vector<cplx> ifft(std::vector<cplx> x) {
    if (x.empty()) return x;
    const double inv_n = 1.0 / static_cast<double>(x.size());
    if (is_pow2(x.size())) {
        fft_pow2(x, true);
    } else {
        x = fft_bluestein(x, true);
    }
    for (auto& v : x) v *= inv_n;
    return x;
}

std::vector<cplx> fft_real(const Signal& x) {
    std::vector<cplx> c(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) c[i] = cplx(x[i], 0.0);
    return fft(std::move(c));
}

std::vector<cplx> analytic_signal(const Signal& x) {
    const std::size_t n = x.size();
    if (n == 0) return {};
    auto spec = fft_real(x);
    // one-sided mask: keep DC (and Nyquist for even n), double positive bins
    const std::size_t half = n / 2;
    for (std::size_t k = 1; k < (n + 1) / 2; ++k) spec[k] *= 2.0;
    for (std::size_t k = half + 1; k < n; ++k) spec[k] = cplx(0.0, 0.0);
    return ifft(std::move(spec));
}

}  // namespace fc
