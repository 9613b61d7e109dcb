// Internal DFT wrapper (FFTW3 behind a thread-safe plan cache).
#pragma once

#include <complex>
#include <vector>

namespace qpfc::detail {

// u_n = (1/M) sum_j v_j e^{-i n 2 pi j / M} for n = -order..order.
// Returns 2*order+1 coefficients indexed n+order. Requires M >= 2*order+1.
std::vector<std::complex<double>> analyze(const std::vector<double>& values,
                                          int order);

// f(theta_j) = sum_n c_n e^{i n 2 pi j / m}, j = 0..m-1, where the input
// holds c_{-order}..c_{order}. Requires m >= coeffs.size().
std::vector<double> synthesize(const std::vector<std::complex<double>>& coeffs,
                               int m);

}  // namespace qpfc::detail
