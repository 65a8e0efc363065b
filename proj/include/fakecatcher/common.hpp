#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fc {

using Signal = std::vector<double>;

// One-sided power spectrum. freqs strictly increasing, power >= 0.
struct Spectrum {
    std::vector<double> freqs;
    std::vector<double> power;

    std::size_t size() const { return freqs.size(); }
};

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad argument / configuration.
struct ParamError : Error {
    using Error::Error;
};

// Input data could not be loaded or is malformed.
struct IngestError : Error {
    using Error::Error;
};

namespace stats {

double mean(const double* x, std::size_t n);
double variance(const double* x, std::size_t n);  // population (1/n)
double stddev(const double* x, std::size_t n);

inline double mean(const Signal& x) { return mean(x.data(), x.size()); }
inline double variance(const Signal& x) { return variance(x.data(), x.size()); }
inline double stddev(const Signal& x) { return stddev(x.data(), x.size()); }

double min(const Signal& x);
double max(const Signal& x);
double median(Signal x);  // by value: sorts a copy

}  // namespace stats

inline bool all_finite(const Signal& x) {
    return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace fc
