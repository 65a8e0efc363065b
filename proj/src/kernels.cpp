#include "fakecatcher/kernels.hpp"

#include "fakecatcher/common.hpp"

namespace fc::kernels {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double sum(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i];
    return acc;
}

double sumsq(const double* x, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * x[i];
    return acc;
}

double sqdist(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale(double a, double* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

}  // namespace scalar

namespace {

Backend detect_backend() {
#ifdef FC_KERNELS_HAVE_AVX2
    if (cpu_supports(Backend::avx2)) return Backend::avx2;
#endif
    return Backend::scalar;
}

Backend& current() {
    static Backend b = detect_backend();
    return b;
}

}  // namespace

bool cpu_supports(Backend b) {
    if (b == Backend::scalar) return true;
#ifdef FC_KERNELS_HAVE_AVX2
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") != 0;
#else
    (void)b;
    return false;
#endif
}

Backend active() { return current(); }

void force(Backend b) {
    if (!cpu_supports(b)) throw ParamError("kernel backend not supported on this CPU");
    current() = b;
}

std::string_view name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
    }
    return "?";
}

#ifdef FC_KERNELS_HAVE_AVX2
#define FC_DISPATCH(fn, ...) \
    return current() == Backend::avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__)
#define FC_DISPATCH_VOID(fn, ...)                     \
    if (current() == Backend::avx2) {                 \
        avx2::fn(__VA_ARGS__);                        \
    } else {                                          \
        scalar::fn(__VA_ARGS__);                      \
    }
#else
#define FC_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#define FC_DISPATCH_VOID(fn, ...) scalar::fn(__VA_ARGS__)
#endif

double dot(const double* a, const double* b, std::size_t n) { FC_DISPATCH(dot, a, b, n); }
double sum(const double* x, std::size_t n) { FC_DISPATCH(sum, x, n); }
double sumsq(const double* x, std::size_t n) { FC_DISPATCH(sumsq, x, n); }
double sqdist(const double* a, const double* b, std::size_t n) { FC_DISPATCH(sqdist, a, b, n); }
void axpy(double a, const double* x, double* y, std::size_t n) { FC_DISPATCH_VOID(axpy, a, x, y, n); }
void scale(double a, double* x, std::size_t n) { FC_DISPATCH_VOID(scale, a, x, n); }

#undef FC_DISPATCH
#undef FC_DISPATCH_VOID

}  // namespace fc::kernels
