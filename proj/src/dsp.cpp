#include "qrng/dsp.hpp"
#include "qrng/errors.hpp"
#include "qrng/fft_util.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qrng {
namespace dsp {
namespace {

double sinc(double x) {
    if (std::abs(x) < 1e-12) return 1.0;
    return std::sin(M_PI * x) / (M_PI * x);
}

} // namespace

FilterKernel design_bandpass(double low, double high, double fs, int n_taps) {
    if (!(low > 0) || !(low < high) || !(high < fs / 2))
        throw Error("design_bandpass: need 0 < low < high < fs/2");
    if (n_taps < 63 || n_taps % 2 == 0)
        throw Error("design_bandpass: n_taps must be odd and >= 63");

    const int M = n_taps;
    const double c = (M - 1) / 2.0;
    // Cutoffs sit half a transition width outside the nominal band so the
    // band edges themselves are already in the flat region.
    double d = 1.5 * fs / M;
    d = std::min({d, 0.5 * low, 0.5 * (fs / 2 - high)});
    const double f1 = low - d;
    const double f2 = high + d;

    std::vector<double> h(M), w(M);
    for (int i = 0; i < M; ++i) {
        const double t = static_cast<double>(i);
        w[i] = 0.42 - 0.5 * std::cos(2.0 * M_PI * t / (M - 1)) +
               0.08 * std::cos(4.0 * M_PI * t / (M - 1));
        const double lp2 = 2.0 * f2 / fs * sinc(2.0 * f2 / fs * (t - c));
        const double lp1 = 2.0 * f1 / fs * sinc(2.0 * f1 / fs * (t - c));
        h[i] = (lp2 - lp1) * w[i];
    }
    // Pin the DC gain to exactly zero, preserving symmetry.
    const double sum_h = std::accumulate(h.begin(), h.end(), 0.0);
    const double sum_w = std::accumulate(w.begin(), w.end(), 0.0);
    for (int i = 0; i < M; ++i) h[i] -= w[i] * (sum_h / sum_w);

    FilterKernel k{std::move(h), low, high, fs};
    const double g0 = kernel_gain(k, 0.5 * (low + high));
    for (double& v : k.taps) v /= g0;
    return k;
}

double kernel_gain(const FilterKernel& k, double f) {
    const double om = 2.0 * M_PI * f / k.design_rate;
    double re = 0.0, im = 0.0;
    for (size_t i = 0; i < k.taps.size(); ++i) {
        re += k.taps[i] * std::cos(om * static_cast<double>(i));
        im -= k.taps[i] * std::sin(om * static_cast<double>(i));
    }
    return std::hypot(re, im);
}

std::vector<double> apply_filter(std::span<const double> x, const FilterKernel& k) {
    if (x.size() <= k.taps.size())
        throw Error("apply_filter: input must be longer than the kernel");
    return fft_convolve_valid(x, k.taps);
}

std::vector<double> apply_filter(std::span<const int16_t> x, const FilterKernel& k) {
    std::vector<double> xd(x.begin(), x.end());
    return apply_filter(std::span<const double>(xd), k);
}

AcfProfile autocorrelation(std::span<const double> x, int max_lag) {
    if (max_lag < 1) throw Error("autocorrelation: max_lag must be >= 1");
    const size_t n = x.size();
    if (n < static_cast<size_t>(10) * static_cast<size_t>(max_lag))
        throw Error("autocorrelation: input shorter than 10*max_lag");

    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    std::vector<double> y(n);
    for (size_t t = 0; t < n; ++t) y[t] = x[t] - mean;
    double denom = 0.0;
    for (double v : y) denom += v * v;
    if (denom <= 0.0) throw Error("autocorrelation: zero-variance input");

    AcfProfile p;
    p.n_samples = n;
    p.bound99 = 2.5758293035489004 / std::sqrt(static_cast<double>(n));
    p.lags.resize(max_lag + 1);
    p.values.resize(max_lag + 1);
    for (int k = 0; k <= max_lag; ++k) {
        double s = 0.0;
        const size_t lim = n - static_cast<size_t>(k);
        for (size_t t = 0; t < lim; ++t) s += y[t] * y[t + k];
        p.lags[k] = k;
        p.values[k] = s / denom;
    }
    return p;
}

int first_zero_lag(const AcfProfile& acf) {
    if (acf.values.size() < 2) throw Error("first_zero_lag: need at least 2 lags");
    for (size_t k = 1; k < acf.values.size(); ++k)
        if (acf.values[k] <= 0.0) return static_cast<int>(k);
    throw Error("first_zero_lag: no zero crossing within max_lag");
}

template <typename T>
std::vector<T> downsample(std::span<const T> x, size_t factor, size_t phase) {
    if (factor < 1) throw Error("downsample: factor must be >= 1");
    if (phase >= factor) throw Error("downsample: phase must be < factor");
    std::vector<T> out;
    out.reserve(x.size() / factor + 1);
    for (size_t i = phase; i < x.size(); i += factor) out.push_back(x[i]);
    return out;
}

template std::vector<double> downsample<double>(std::span<const double>, size_t, size_t);
template std::vector<int16_t> downsample<int16_t>(std::span<const int16_t>, size_t, size_t);

} // namespace dsp
} // namespace qrng
