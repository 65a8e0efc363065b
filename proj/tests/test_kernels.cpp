#include "doctest.h"

#include <random>

#include "fakecatcher/kernels.hpp"

#include "oracles.hpp"

namespace k = fc::kernels;

namespace {

struct BackendGuard {
    k::Backend saved;
    BackendGuard() : saved(k::active()) {}
    ~BackendGuard() { k::force(saved); }
};

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar kernels match straightforward accumulation") {
    const auto a = oracle::random_signal(131, 7);
    const auto b = oracle::random_signal(131, 8);
    double dot = 0.0, sum = 0.0, ss = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        sum += a[i];
        ss += a[i] * a[i];
        const double d = a[i] - b[i];
        sq += d * d;
    }
    CHECK(k::scalar::dot(a.data(), b.data(), a.size()) == doctest::Approx(dot).epsilon(1e-12));
    CHECK(k::scalar::sum(a.data(), a.size()) == doctest::Approx(sum).epsilon(1e-12));
    CHECK(k::scalar::sumsq(a.data(), a.size()) == doctest::Approx(ss).epsilon(1e-12));
    CHECK(k::scalar::sqdist(a.data(), b.data(), a.size()) == doctest::Approx(sq).epsilon(1e-12));
}

TEST_CASE("backends are equivalent on random data") {
    if (!k::cpu_supports(k::Backend::avx2)) return;  // nothing to compare on this machine
    // lengths straddle the vector width and the unrolled tail
    for (std::size_t n : {0UL, 1UL, 3UL, 4UL, 7UL, 8UL, 9UL, 63UL, 64UL, 127UL, 1024UL}) {
        const auto a = oracle::random_signal(n, 100 + n);
        const auto b = oracle::random_signal(n, 200 + n);
        const double tol = 1e-12;
        CHECK(oracle::rel_err(k::avx2::dot(a.data(), b.data(), n),
                              k::scalar::dot(a.data(), b.data(), n)) < tol);
        CHECK(oracle::rel_err(k::avx2::sum(a.data(), n), k::scalar::sum(a.data(), n)) < tol);
        CHECK(oracle::rel_err(k::avx2::sumsq(a.data(), n), k::scalar::sumsq(a.data(), n)) < tol);
        CHECK(oracle::rel_err(k::avx2::sqdist(a.data(), b.data(), n),
                              k::scalar::sqdist(a.data(), b.data(), n)) < tol);

        auto y1 = b, y2 = b;
        k::scalar::axpy(0.37, a.data(), y1.data(), n);
        k::avx2::axpy(0.37, a.data(), y2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-13));

        auto x1 = a, x2 = a;
        k::scalar::scale(-1.83, x1.data(), n);
        k::avx2::scale(-1.83, x2.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(x1[i] == x2[i]);
    }
}

TEST_CASE("runtime dispatch honors force()") {
    BackendGuard guard;
    k::force(k::Backend::scalar);
    CHECK(k::active() == k::Backend::scalar);
    const auto a = oracle::random_signal(33, 5);
    const double via_dispatch = k::sum(a.data(), a.size());
    CHECK(via_dispatch == k::scalar::sum(a.data(), a.size()));
    if (k::cpu_supports(k::Backend::avx2)) {
        k::force(k::Backend::avx2);
        CHECK(k::active() == k::Backend::avx2);
        CHECK(oracle::rel_err(k::sum(a.data(), a.size()), via_dispatch) < 1e-12);
    }
}

}  // TEST_SUITE
