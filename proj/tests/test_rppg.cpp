#include "doctest.h"

#include <numbers>

#include "fakecatcher/rppg.hpp"
#include "fakecatcher/transforms.hpp"

#include "oracles.hpp"

using namespace fc;

namespace {

// amplitude of a sinusoid measured away from the edges
double central_amplitude(const Signal& x) {
    const std::size_t lo = x.size() / 5;
    const std::size_t hi = x.size() - lo;
    double m = 0.0;
    for (std::size_t i = lo; i < hi; ++i) m = std::max(m, std::abs(x[i]));
    return m;
}

RegionTrace make_trace(const Signal& r, const Signal& g, const Signal& b, double fps = 30.0) {
    RegionTrace t;
    t.mean_r = r;
    t.mean_g = g;
    t.mean_b = b;
    t.fps = fps;
    return t;
}

}  // namespace

TEST_SUITE("rppg") {

TEST_CASE("band-pass: DC is rejected by at least 40 dB") {
    const Signal dc(512, 1.0);
    const auto y = butterworth_bandpass(dc, 30.0, {});
    CHECK(central_amplitude(y) < 0.01);  // -40 dB of a unit input
}

TEST_CASE("band-pass: 2 Hz passes within 1 dB, band edges attenuate") {
    PpgConfig cfg;
    const double fps = 30.0;
    const auto mid = butterworth_bandpass(oracle::sine(1024, 2.0, fps), fps, cfg);
    const double gain_mid = central_amplitude(mid);
    CHECK(gain_mid >= 0.89);  // -1 dB
    CHECK(gain_mid <= 1.12);  // +1 dB

    const auto low = butterworth_bandpass(oracle::sine(1024, 0.1, fps), fps, cfg);
    CHECK(central_amplitude(low) < 0.1);  // >= 20 dB down

    const auto high = butterworth_bandpass(oracle::sine(1024, 14.9, fps), fps, cfg);
    CHECK(central_amplitude(high) < 0.317);  // >= 10 dB down
}

TEST_CASE("band-pass: linearity") {
    const auto x = oracle::random_signal(256, 31);
    const auto y = oracle::random_signal(256, 32);
    Signal combo(256);
    for (std::size_t i = 0; i < 256; ++i) combo[i] = 2.0 * x[i] - 0.5 * y[i];
    const auto fx = butterworth_bandpass(x, 30.0, {});
    const auto fy = butterworth_bandpass(y, 30.0, {});
    const auto fc_ = butterworth_bandpass(combo, 30.0, {});
    Signal expect(256);
    for (std::size_t i = 0; i < 256; ++i) expect[i] = 2.0 * fx[i] - 0.5 * fy[i];
    CHECK(oracle::max_rel_err(fc_, expect) < 1e-9);
}

TEST_CASE("band-pass: zero phase keeps a symmetric pulse centered") {
    Signal pulse(257, 0.0);
    for (int i = 0; i < 257; ++i) {
        const double d = (i - 128) / 6.0;
        pulse[static_cast<std::size_t>(i)] = std::exp(-0.5 * d * d);
    }
    const auto y = butterworth_bandpass(pulse, 30.0, {});
    std::size_t arg = 0;
    for (std::size_t i = 1; i < y.size(); ++i) {
        if (y[i] > y[arg]) arg = i;
    }
    CHECK(arg == 128);
}

TEST_CASE("band-pass: Nyquist violation is rejected") {
    PpgConfig cfg;
    cfg.band_high = 16.0;
    CHECK_THROWS_AS(butterworth_bandpass(Signal(64, 0.0), 30.0, cfg), ParamError);
}

TEST_CASE("gppg: constant green vanishes; in-band tone survives; sub-band tone drops") {
    PpgConfig cfg;
    const double fps = 30.0;
    const auto flat = gppg(make_trace(Signal(256, 90.0), Signal(256, 128.0), Signal(256, 70.0)), cfg);
    CHECK(central_amplitude(flat) < 1e-6);

    Signal g = oracle::sine(1024, 1.2, fps, 1.0);
    for (double& v : g) v += 128.0;
    const auto inband =
        gppg(make_trace(Signal(1024, 90.0), g, Signal(1024, 70.0)), cfg);
    CHECK(central_amplitude(inband) == doctest::Approx(1.0).epsilon(0.05));

    Signal slow = oracle::sine(1024, 0.1, fps, 1.0);
    for (double& v : slow) v += 128.0;
    const auto low = gppg(make_trace(Signal(1024, 90.0), slow, Signal(1024, 70.0)), cfg);
    CHECK(central_amplitude(low) < 0.1);  // >= 20 dB down
}

TEST_CASE("chrom: achromatic input cancels") {
    Signal v = oracle::sine(256, 1.3, 30.0, 2.0);
    for (double& s : v) s += 100.0;
    const auto out = chrom_ppg(make_trace(v, v, v));
    CHECK(central_amplitude(out) < 1e-9);
}

TEST_CASE("chrom: constant color cancels, pulsatile green peaks at the pulse rate") {
    const auto out = chrom_ppg(make_trace(Signal(128, 140.0), Signal(128, 100.0), Signal(128, 90.0)));
    CHECK(central_amplitude(out) < 1e-9);

    const double fps = 30.0, f_pulse = 1.2;
    Signal r(512, 140.0), g(512, 100.0), b(512, 90.0);
    const auto pulse = oracle::sine(512, f_pulse, fps, 1.0);
    for (std::size_t i = 0; i < 512; ++i) g[i] += pulse[i];
    const auto out2 = chrom_ppg(make_trace(r, g, b, fps));
    const auto spec = welch_psd(out2, fps, {});
    std::size_t arg = 1;
    for (std::size_t k = 1; k < spec.size(); ++k) {
        if (spec.power[k] > spec.power[arg]) arg = k;
    }
    const double df = spec.freqs[1] - spec.freqs[0];
    CHECK(std::abs(spec.freqs[arg] - f_pulse) <= df);
}

TEST_CASE("chrom: vanishing chroma Y flags degenerate") {
    // construct B so that 1.5*Rn + Gn - 1.5*Bn is constant while X varies
    Signal r(128, 80.0), g = oracle::sine(128, 1.0, 30.0, 5.0), b(128);
    for (double& v : g) v += 100.0;
    const double mg = stats::mean(g);
    for (std::size_t i = 0; i < 128; ++i) b[i] = 60.0 * (0.5 + g[i] / mg) / 1.5;
    bool degenerate = false;
    (void)chrom_ppg(make_trace(r, g, b), {}, &degenerate);
    CHECK(degenerate);

    Signal zero_mean(64, 0.0);
    CHECK_THROWS_AS(chrom_ppg(make_trace(zero_mean, zero_mean, zero_mean)), ParamError);
}

TEST_CASE("welch: pure tone lands in the right bin") {
    PpgConfig cfg;
    const double fps = 30.0;
    const auto spec = welch_psd(oracle::sine(512, 2.0, fps), fps, cfg);
    CHECK(spec.size() == 256);
    std::size_t arg = 0;
    for (std::size_t k = 1; k < spec.size(); ++k) {
        if (spec.power[k] > spec.power[arg]) arg = k;
    }
    const double bin_width = fps / (2.0 * 256.0);
    CHECK(spec.freqs[arg] <= 2.0);
    CHECK(2.0 < spec.freqs[arg] + bin_width);
}

TEST_CASE("welch: frequencies increase and power is nonnegative") {
    const auto x = oracle::random_signal(300, 4);
    const auto spec = welch_psd(x, 25.0, {});
    for (std::size_t k = 0; k + 1 < spec.size(); ++k) CHECK(spec.freqs[k] < spec.freqs[k + 1]);
    for (double p : spec.power) CHECK(p >= 0.0);
}

TEST_CASE("welch: white noise is flat after coarse binning") {
    PpgConfig cfg;
    cfg.welch_bins = 256;
    const auto x = oracle::random_signal(4096, 99);
    const auto spec = welch_psd(x, 30.0, cfg);
    // collapse to 64 coarse bins; skip DC (detrending empties it)
    std::vector<double> coarse(64, 0.0);
    for (std::size_t k = 1; k < spec.size(); ++k) coarse[k * 64 / spec.size()] += spec.power[k];
    double lo = coarse[1], hi = coarse[1];
    for (std::size_t i = 1; i < coarse.size(); ++i) {
        lo = std::min(lo, coarse[i]);
        hi = std::max(hi, coarse[i]);
    }
    CHECK(hi / lo < 10.0);
}

TEST_CASE("welch equals the mean of naive per-window periodograms") {
    PpgConfig cfg;
    cfg.welch_bins = 64;
    cfg.welch_window = 64;
    const double fps = 30.0;
    const auto x = oracle::random_signal(256, 1234);
    const auto got = welch_psd(x, fps, cfg);

    // independent recomputation with the naive DFT
    const std::size_t win = 64, hop = 32, nfft = 128;
    Signal w(win);
    for (std::size_t i = 0; i < win; ++i)
        w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                    static_cast<double>(win - 1));
    double u = 0.0;
    for (double v : w) u += v * v;
    std::vector<double> acc(cfg.welch_bins, 0.0);
    std::size_t nseg = 0;
    for (std::size_t start = 0; start + win <= x.size(); start += hop) {
        Signal seg(nfft, 0.0);
        double m = 0.0;
        for (std::size_t i = 0; i < win; ++i) m += x[start + i];
        m /= static_cast<double>(win);
        for (std::size_t i = 0; i < win; ++i) seg[i] = w[i] * (x[start + i] - m);
        const auto spec = oracle::naive_dft_real(seg);
        for (int k = 0; k < cfg.welch_bins; ++k)
            acc[static_cast<std::size_t>(k)] += std::norm(spec[static_cast<std::size_t>(k)]);
        ++nseg;
    }
    for (int k = 0; k < cfg.welch_bins; ++k) {
        const double one_sided = k == 0 ? 1.0 : 2.0;
        const double want =
            acc[static_cast<std::size_t>(k)] / (fps * u * static_cast<double>(nseg)) * one_sided;
        if (want > 1e-12) {
            CHECK(oracle::rel_err(got.power[static_cast<std::size_t>(k)], want) < 1e-6);
        }
    }
}

TEST_CASE("cross psd: self-consistency and orthogonal tones") {
    const auto x = oracle::random_signal(256, 8);
    const auto self = welch_cross_psd(x, x, 30.0, {});
    const auto ref = welch_psd(x, 30.0, {});
    CHECK(oracle::max_rel_err(self.power, ref.power) < 1e-12);

    const auto a = oracle::sine(512, 2.0, 30.0);
    const auto b = oracle::sine(512, 5.0, 30.0);
    const auto cross = welch_cross_psd(a, b, 30.0, {});
    const auto pa = welch_psd(a, 30.0, {});
    double cross_max = 0.0, self_max = 0.0;
    for (std::size_t k = 0; k < cross.size(); ++k) {
        cross_max = std::max(cross_max, cross.power[k]);
        self_max = std::max(self_max, pa.power[k]);
    }
    CHECK(cross_max < 0.01 * self_max);

    CHECK_THROWS_AS(welch_cross_psd(a, oracle::sine(256, 5.0, 30.0), 30.0, {}), ParamError);
}

TEST_CASE("cross psd: coherent pair beats incoherent pair in-band") {
    const double fps = 30.0;
    const auto tone = oracle::sine(512, 1.4, fps);
    auto a = tone, b = tone;
    const auto na = oracle::random_signal(512, 61, -0.3, 0.3);
    const auto nb = oracle::random_signal(512, 62, -0.3, 0.3);
    for (std::size_t i = 0; i < 512; ++i) {
        a[i] += na[i];
        b[i] += nb[i];
    }
    const auto coherent = welch_cross_psd(a, b, fps, {});
    // incoherent: same marginals, opposite-frequency tones
    auto c = oracle::sine(512, 1.1, fps), d = oracle::sine(512, 2.3, fps);
    for (std::size_t i = 0; i < 512; ++i) {
        c[i] += na[i];
        d[i] += nb[i];
    }
    const auto incoherent = welch_cross_psd(c, d, fps, {});
    double peak_co = 0.0, peak_in = 0.0;
    for (std::size_t k = 0; k < coherent.size(); ++k) {
        peak_co = std::max(peak_co, coherent.power[k]);
        peak_in = std::max(peak_in, incoherent.power[k]);
    }
    CHECK(peak_co > 4.0 * peak_in);
}

TEST_CASE("bundle: derived sets and identical-trace degeneracy") {
    const double fps = 30.0;
    Signal r(128, 140.0), g(128, 100.0), b(128, 90.0);
    const auto pulse = oracle::sine(128, 1.2, fps, 1.5);
    const auto n1 = oracle::random_signal(128, 5, -0.2, 0.2);
    for (std::size_t i = 0; i < 128; ++i) {
        r[i] += 0.4 * pulse[i];
        g[i] += pulse[i] + n1[i];
        b[i] += 0.2 * pulse[i];
    }
    const auto trace = make_trace(r, g, b, fps);
    const auto bundle = build_bundle(trace, trace, trace);
    CHECK(bundle.omega() == 128);

    // identical traces in every region: cross-region differences vanish
    for (const Signal& dc : bundle.d_c()) {
        for (double v : dc) CHECK(std::abs(v) < 1e-12);
    }

    // independent noise per region: differences are nonzero
    auto g2 = g, g3 = g;
    const auto n2 = oracle::random_signal(128, 6, -0.5, 0.5);
    const auto n3 = oracle::random_signal(128, 7, -0.5, 0.5);
    for (std::size_t i = 0; i < 128; ++i) {
        g2[i] = std::clamp(g2[i] + n2[i], 0.0, 255.0);
        g3[i] = std::clamp(g3[i] + n3[i], 0.0, 255.0);
    }
    const auto noisy =
        build_bundle(make_trace(r, g2, b, fps), trace, make_trace(r, g3, b, fps));
    double mass = 0.0;
    for (const Signal& dc : noisy.d_c()) mass += stats::mean(dc);
    CHECK(mass > 0.0);

    auto short_trace = trace.slice(0, 64);
    CHECK_THROWS_AS(build_bundle(trace, short_trace, trace), ParamError);
}

}  // TEST_SUITE
