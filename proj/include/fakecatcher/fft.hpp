#pragma once

#include <complex>
#include <vector>

#include "fakecatcher/common.hpp"

namespace fc {

using cplx = std::complex<double>;

// Forward DFT, any length (radix-2 for powers of two, Bluestein otherwise).
std::vector<cplx> fft(std::vector<cplx> x);
// Inverse DFT including the 1/n factor.
std::vector<cplx> ifft(std::vector<cplx> x);

std::vector<cplx> fft_real(const Signal& x);

// Analytic signal z(t) with one-sided spectrum; |z| is the instantaneous
// amplitude envelope.
std::vector<cplx> analytic_signal(const Signal& x);

}  // namespace fc
