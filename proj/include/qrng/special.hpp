#pragma once
// Reference distributions for the test battery.

namespace qrng {
namespace sf {

/// Regularized upper incomplete gamma Q(a, x), a > 0, x >= 0.
/// Series for x < a+1, continued fraction otherwise; ~1e-12 relative or
/// better over the battery's range of arguments.
double igamc(double a, double x);

/// Standard normal CDF.
double normal_cdf(double x);

/// Kolmogorov-Smirnov distance of a sample against U[0,1].
double ks_uniform_distance(const double* p, unsigned long n);

} // namespace sf
} // namespace qrng
