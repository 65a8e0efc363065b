#pragma once

#include <cstddef>
#include <string_view>

// Data-parallel inner loops used by the filter, feature, SVM, and CNN code.
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant selected at runtime. The two are equivalence-tested against each
// other; results may differ in the last bits because vector lanes change the
// summation order.

namespace fc::kernels {

enum class Backend { scalar, avx2 };

Backend active();
bool cpu_supports(Backend b);
// Override the dispatch target (tests). Throws ParamError if the CPU lacks it.
void force(Backend b);
std::string_view name(Backend b);

double dot(const double* a, const double* b, std::size_t n);
double sum(const double* x, std::size_t n);
double sumsq(const double* x, std::size_t n);
// Squared Euclidean distance; the RBF kernel hot loop.
double sqdist(const double* a, const double* b, std::size_t n);
// y += a * x
void axpy(double a, const double* x, double* y, std::size_t n);
void scale(double a, double* x, std::size_t n);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* x, std::size_t n);
double sumsq(const double* x, std::size_t n);
double sqdist(const double* a, const double* b, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void scale(double a, double* x, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define FC_KERNELS_HAVE_AVX2 1
namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
double sum(const double* x, std::size_t n);
double sumsq(const double* x, std::size_t n);
double sqdist(const double* a, const double* b, std::size_t n);
void axpy(double a, const double* x, double* y, std::size_t n);
void scale(double a, double* x, std::size_t n);
}  // namespace avx2
#endif

}  // namespace fc::kernels
