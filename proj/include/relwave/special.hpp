#pragma once

#include <complex>
#include <vector>

namespace relwave::special {

inline constexpr double kOverflowGuard = 700.0;

// e^{-|u|} I_k(|u|) for k = 0..kmax by Miller's backward recurrence,
// normalized with I_0 + 2 sum_k I_k = e^u. Extra tail entries are kept so the
// returned vector may be longer than kmax + 1.
std::vector<double> bessel_i_scaled_sequence(int kmax, double u);

// e^{-|u|} I_k(u); integer k of either sign.
double bessel_i_scaled(int k, double u);
// I_k(u); throws NumericalGuard for |u| > 700.
double bessel_i(int k, double u);

// E_{alpha,beta}(z) = sum_k z^k / Gamma(beta + alpha k). Throws NumericalGuard
// for |z| > 30 or when cancellation in the partial sums exceeds 1e5.
std::complex<double> mittag_leffler(double alpha, double beta, std::complex<double> z);

double erfc(double u);

}  // namespace relwave::special
