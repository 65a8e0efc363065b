#include "doctest.h"

#include <numbers>

#include "fakecatcher/fft.hpp"
#include "fakecatcher/transforms.hpp"

#include "oracles.hpp"

using namespace fc;

TEST_SUITE("transforms") {

TEST_CASE("fft matches the naive DFT on mixed lengths") {
    for (std::size_t n : {8UL, 64UL, 127UL}) {
        const auto x = oracle::random_signal(n, 42 + n);
        const auto got = fft_real(x);
        const auto want = oracle::naive_dft_real(x);
        double scale = 0.0;
        for (const auto& v : want) scale = std::max(scale, std::abs(v));
        for (std::size_t k = 0; k < n; ++k) {
            CHECK(std::abs(got[k] - want[k]) / scale < 1e-9);
        }
    }
}

TEST_CASE("ifft inverts fft") {
    for (std::size_t n : {16UL, 100UL}) {
        const auto x = oracle::random_signal(n, 5 + n);
        std::vector<cplx> c(n);
        for (std::size_t i = 0; i < n; ++i) c[i] = cplx(x[i], 0.0);
        const auto back = ifft(fft(std::move(c)));
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(std::abs(back[i].real() - x[i]) < 1e-10);
            CHECK(std::abs(back[i].imag()) < 1e-10);
        }
    }
}

TEST_CASE("autocorr: zero signal is zero and flagged") {
    bool degenerate = false;
    const auto r = autocorr(Signal(32, 0.0), &degenerate);
    CHECK(degenerate);
    for (double v : r) CHECK(v == 0.0);
}

TEST_CASE("autocorr: lag-0 is 1, periodic sine peaks at one period") {
    // period 16 samples over 512 keeps the biased estimate above 0.95
    const auto x = oracle::sine(512, 2.0, 32.0);
    const auto r = autocorr(x);
    CHECK(r[0] == doctest::Approx(1.0));
    CHECK(r[16] >= 0.95);
    // matches the O(n^2) definition
    const auto want = oracle::naive_autocorr(x);
    CHECK(oracle::max_rel_err(r, want) < 1e-9);
}

TEST_CASE("autocorr: white noise stays below the 3/sqrt(n) band at most lags") {
    std::size_t total = 0, inside = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const std::size_t n = 256;
        const auto x = oracle::random_signal(n, 1000 + seed);
        const auto r = autocorr(x);
        const double bound = 3.0 / std::sqrt(static_cast<double>(n));
        for (std::size_t k = 1; k < n / 2; ++k) {
            ++total;
            if (std::abs(r[k]) < bound) ++inside;
        }
    }
    CHECK(static_cast<double>(inside) / static_cast<double>(total) > 0.99);
}

TEST_CASE("spectral autocorr: single sine has a dominant central pulse") {
    const auto x = oracle::sine(256, 3.0, 30.0);
    const auto a = spectral_autocorr(x);
    CHECK(a[0] == doctest::Approx(1.0));
    // away from lag 0 the mass decays
    double far = 0.0;
    for (std::size_t k = 10; k < a.size(); ++k) far = std::max(far, std::abs(a[k]));
    CHECK(far < a[0]);

    bool degenerate = false;
    const auto z = spectral_autocorr(Signal(64, 0.0), &degenerate);
    CHECK(degenerate);
    for (double v : z) CHECK(v == 0.0);
}

TEST_CASE("spectral autocorr: two sines spaced df produce a secondary peak at df") {
    const double fps = 64.0;
    const std::size_t n = 256;
    // spacing of 8 Hz = 32 spectrum bins over n/2+1 = 129 mag samples
    Signal x = oracle::sine(n, 8.0, fps);
    const Signal y = oracle::sine(n, 16.0, fps);
    for (std::size_t i = 0; i < n; ++i) x[i] += y[i];
    const auto a = spectral_autocorr(x);
    // the secondary peak sits where the two spectral lines overlap: 32 bins
    std::size_t arg = 5;
    for (std::size_t k = 5; k < a.size(); ++k) {
        if (a[k] > a[arg]) arg = k;
    }
    CHECK(arg == 32);
}

TEST_CASE("xcorr: identity peak, shift recovery, noise floor") {
    const auto x = oracle::random_signal(128, 77);
    const auto self = xcorr(x, x);
    CHECK(self.max_value() == doctest::Approx(1.0));
    CHECK(self.argmax_lag() == 0);

    // delayed copy: y[t] = x[t-k]
    const int k = 9;
    Signal y(x.size(), 0.0);
    for (std::size_t t = static_cast<std::size_t>(k); t < x.size(); ++t)
        y[t] = x[t - static_cast<std::size_t>(k)];
    CHECK(xcorr(x, y).argmax_lag() == k);

    const auto want = oracle::naive_xcorr(x, y);
    CHECK(oracle::max_rel_err(xcorr(x, y).values, want) < 1e-9);

    int low = 0;
    const int trials = 40;
    for (int s = 0; s < trials; ++s) {
        const auto a = oracle::random_signal(128, 5000 + static_cast<std::uint64_t>(s));
        const auto b = oracle::random_signal(128, 9000 + static_cast<std::uint64_t>(s));
        if (xcorr(a, b).max_abs() < 0.35) ++low;
    }
    CHECK(low >= trials * 95 / 100);
}

TEST_CASE("log_scale: anchors and monotonicity in |x|") {
    CHECK(log_scale({0.0})[0] == 0.0);
    CHECK(log_scale({std::numbers::e - 1.0})[0] == doctest::Approx(1.0));
    const auto x = oracle::random_signal(100, 3, -5.0, 5.0);
    const auto l = log_scale(x);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        if (std::abs(x[i]) < std::abs(x[i + 1])) {
            CHECK(l[i] < l[i + 1]);
        } else if (std::abs(x[i]) > std::abs(x[i + 1])) {
            CHECK(l[i] > l[i + 1]);
        }
    }
}

TEST_CASE("dct: analytic anchors") {
    const std::size_t n = 32;
    const double c = 3.25;
    const auto spec = dct(Signal(n, c));
    CHECK(spec[0] == doctest::Approx(c * std::sqrt(static_cast<double>(n))));
    for (std::size_t k = 1; k < n; ++k) CHECK(std::abs(spec[k]) < 1e-12);

    // cosine at an exact basis frequency -> a single nonzero coefficient
    Signal basis(n);
    for (std::size_t m = 0; m < n; ++m) {
        basis[m] = std::cos(std::numbers::pi * 5.0 * (2.0 * static_cast<double>(m) + 1.0) /
                            (2.0 * static_cast<double>(n)));
    }
    const auto bs = dct(basis);
    for (std::size_t k = 0; k < n; ++k) {
        if (k == 5) {
            CHECK(std::abs(bs[k]) > 1.0);
        } else {
            CHECK(std::abs(bs[k]) < 1e-10);
        }
    }
}

TEST_CASE("dct matches the naive O(n^2) definition and preserves energy") {
    for (std::size_t n : {8UL, 64UL, 127UL}) {
        const auto x = oracle::random_signal(n, 21 + n);
        const auto got = dct(x);
        const auto want = oracle::naive_dct(x);
        CHECK(oracle::max_rel_err(got, want) < 1e-9);
        double ex = 0.0, ec = 0.0;
        for (double v : x) ex += v * v;
        for (double v : got) ec += v * v;
        CHECK(oracle::rel_err(ec, ex) < 1e-9);
    }
}

TEST_CASE("haar: constant signal has zero details") {
    const auto d = haar_decompose(Signal(64, 2.5), 4);
    for (const auto& detail : d.details) {
        for (double v : detail) CHECK(std::abs(v) < 1e-12);
    }
    CHECK_FALSE(d.padded);
}

TEST_CASE("haar: perfect reconstruction and energy conservation") {
    const auto x = oracle::random_signal(128, 11);
    const auto d = haar_decompose(x, 4);
    const auto back = haar_reconstruct(d);
    CHECK(oracle::max_rel_err(back, x) < 1e-9);

    const auto coeffs = d.coefficients();
    double ex = 0.0, ec = 0.0;
    for (double v : x) ex += v * v;
    for (double v : coeffs) ec += v * v;
    CHECK(oracle::rel_err(ec, ex) < 1e-9);
}

TEST_CASE("haar: non-multiple lengths zero-pad and flag; step localizes") {
    const auto x = oracle::random_signal(100, 13);
    const auto d = haar_decompose(x, 4);
    CHECK(d.padded);
    CHECK(d.padded_length == 112);
    CHECK(oracle::max_rel_err(haar_reconstruct(d), x) < 1e-9);

    Signal step(64, 0.0);
    for (std::size_t i = 32; i < 64; ++i) step[i] = 1.0;
    const auto sd = haar_decompose(step, 1);
    // finest-level details vanish everywhere except across the step
    const Signal& fine = sd.details.back();
    for (std::size_t i = 0; i < fine.size(); ++i) {
        CHECK(std::abs(fine[i]) < 1e-12);  // step falls on an even boundary
    }
    Signal step2(64, 0.0);
    for (std::size_t i = 33; i < 64; ++i) step2[i] = 1.0;
    const auto sd2 = haar_decompose(step2, 1);
    const Signal& fine2 = sd2.details.back();
    std::size_t arg = 0;
    for (std::size_t i = 1; i < fine2.size(); ++i) {
        if (std::abs(fine2[i]) > std::abs(fine2[arg])) arg = i;
    }
    CHECK(arg == 16);  // pair (32,33) straddles the step
}

TEST_CASE("lyapunov: logistic map r=4 gives ln 2, sine and constant give ~0") {
    const auto series = oracle::logistic_map(4.0, 0.2137, 3000);
    const auto res = lyapunov_exponents(series, 1);
    CHECK_FALSE(res.degenerate);
    CHECK(res.exponents[0] == doctest::Approx(std::numbers::ln2).epsilon(0.15 / std::numbers::ln2));

    const auto sine = oracle::sine(1500, 1.0, 30.0);
    const auto rs = lyapunov_exponents(sine, 1);
    CHECK(rs.exponents[0] <= 0.01);

    const auto rc = lyapunov_exponents(Signal(512, 1.0), 3);
    CHECK(rc.degenerate);
    for (double v : rc.exponents) CHECK(v == 0.0);
}

TEST_CASE("lyapunov: deterministic and descending") {
    const auto series = oracle::logistic_map(3.9, 0.5, 1200);
    const auto a = lyapunov_exponents(series, 5);
    const auto b = lyapunov_exponents(series, 5);
    CHECK(a.exponents == b.exponents);
    for (std::size_t i = 0; i + 1 < a.exponents.size(); ++i) {
        if (a.exponents[i + 1] != 0.0) CHECK(a.exponents[i] >= a.exponents[i + 1]);
    }
    CHECK_THROWS_AS(lyapunov_exponents(Signal(10, 0.5), 1), ParamError);
}

}  // TEST_SUITE
