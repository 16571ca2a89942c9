#include "qrng/special.hpp"
#include "qrng/errors.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace qrng {
namespace sf {
namespace {

constexpr int kMaxIter = 2000000;
constexpr double kEps = 1e-16;
constexpr double kFpMin = 1e-300;

// Regularized lower incomplete gamma by series.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < kMaxIter; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * kEps)
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw Error("igamc: series failed to converge");
}

// Regularized upper incomplete gamma by Lentz continued fraction.
double gamma_q_cf(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kFpMin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = b + an / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps)
            return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw Error("igamc: continued fraction failed to converge");
}

} // namespace

double igamc(double a, double x) {
    if (!(a > 0) || !(x >= 0)) throw Error("igamc: need a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double ks_uniform_distance(const double* p, unsigned long n) {
    std::vector<double> s(p, p + n);
    std::sort(s.begin(), s.end());
    double d = 0.0;
    for (unsigned long i = 0; i < n; ++i) {
        const double lo = static_cast<double>(i) / static_cast<double>(n);
        const double hi = static_cast<double>(i + 1) / static_cast<double>(n);
        d = std::max({d, std::abs(s[i] - lo), std::abs(s[i] - hi)});
    }
    return d;
}

} // namespace sf
} // namespace qrng
