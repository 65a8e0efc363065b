#include "fakecatcher/common.hpp"

#include "fakecatcher/kernels.hpp"

namespace fc::stats {

double mean(const double* x, std::size_t n) {
    if (n == 0) return 0.0;
    return kernels::sum(x, n) / static_cast<double>(n);
}

double variance(const double* x, std::size_t n) {
    if (n == 0) return 0.0;
    const double m = mean(x, n);
    const double ss = kernels::sumsq(x, n);
    const double v = ss / static_cast<double>(n) - m * m;
    return v > 0.0 ? v : 0.0;
}

double stddev(const double* x, std::size_t n) { return std::sqrt(variance(x, n)); }

double min(const Signal& x) {
    if (x.empty()) throw ParamError("min of empty signal");
    return *std::min_element(x.begin(), x.end());
}

double max(const Signal& x) {
    if (x.empty()) throw ParamError("max of empty signal");
    return *std::max_element(x.begin(), x.end());
}

double median(Signal x) {
    if (x.empty()) throw ParamError("median of empty signal");
    const std::size_t mid = x.size() / 2;
    std::nth_element(x.begin(), x.begin() + mid, x.end());
    if (x.size() % 2 == 1) return x[mid];
    const double hi = x[mid];
    const double lo = *std::max_element(x.begin(), x.begin() + mid);
    return 0.5 * (lo + hi);
}

}  // namespace fc::stats
