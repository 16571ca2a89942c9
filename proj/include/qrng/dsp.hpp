#pragma once
// Digital conditioning: FIR band-pass, autocorrelation, first-zero decimation.

#include <cstdint>
#include <span>
#include <vector>

namespace qrng {
namespace dsp {

/// Linear-phase FIR band-pass (Blackman windowed sinc, exact DC null,
/// unit gain at band centre).
struct FilterKernel {
    std::vector<double> taps;   // odd length, symmetric
    double low_cut = 0.0;       // Hz, nominal band edges
    double high_cut = 0.0;
    double design_rate = 0.0;   // Hz

    size_t group_delay() const { return (taps.size() - 1) / 2; }
};

/// pre: 0 < low < high < fs/2, n_taps odd and >= 63.
/// Meets +-1 dB over [1.1*low, 0.9*high] and >= 40 dB attenuation at DC,
/// 0.25*low and fs/2 for the default 511-tap 0.2-2.2 GHz @ 20 GS/s design.
FilterKernel design_bandpass(double low, double high, double fs, int n_taps = 511);

/// |H(e^{j2pi f/fs})| of the kernel at frequency f.
double kernel_gain(const FilterKernel& k, double f);

/// Linear convolution, valid region only: output length = input - taps + 1.
/// pre: input length > taps length.
std::vector<double> apply_filter(std::span<const double> x, const FilterKernel& k);
std::vector<double> apply_filter(std::span<const int16_t> x, const FilterKernel& k);

/// Normalized sample autocorrelation (biased estimator) with the two-sided
/// 99% Gaussian white-noise bound.
struct AcfProfile {
    std::vector<int> lags;      // 0..max_lag
    std::vector<double> values; // values[0] == 1
    size_t n_samples = 0;
    double bound99 = 0.0;       // 2.5758/sqrt(n)
};

/// pre: x.size() >= 10*max_lag, nonzero variance.
AcfProfile autocorrelation(std::span<const double> x, int max_lag);

/// Smallest k > 0 with r(k) <= 0. Throws if no crossing within the profile.
int first_zero_lag(const AcfProfile& acf);

/// Keep elements at indices phase, phase+factor, ...
template <typename T>
std::vector<T> downsample(std::span<const T> x, size_t factor, size_t phase = 0);

extern template std::vector<double> downsample<double>(std::span<const double>, size_t, size_t);
extern template std::vector<int16_t> downsample<int16_t>(std::span<const int16_t>, size_t, size_t);

} // namespace dsp
} // namespace qrng
