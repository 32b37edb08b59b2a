#pragma once

// Bessel functions of the first kind, orders 0 and 1.
//
// Ascending power series for |x| <= 12, Hankel asymptotic expansion beyond.
// Absolute error is below 1e-10 over the whole real line.

namespace memwalk::models {

inline constexpr double kBesselSeriesCutoff = 12.0;

/// Maximum of J1 on [0, inf), attained near x = 1.8412.
inline constexpr double kBesselJ1Max = 0.58186522428;

double bessel_j0(double x);
double bessel_j1(double x);

/// J1(r) / r as a function of r^2. Equals 1/2 at r = 0 (removable singularity).
/// Avoids the square root on the series branch; this is the hot path of the
/// memory convolution.
double bessel_j1_over_r_sq(double r2);

/// d/dx J1(x) = J0(x) - J1(x)/x, with the limit 1/2 at x = 0.
double bessel_j1_prime(double x);

}  // namespace memwalk::models
