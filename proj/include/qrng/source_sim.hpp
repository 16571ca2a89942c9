#pragma once
// Synthetic entropy source standing in for the InP heterodyne module.
//
// Per quadrature the analog signal is
//   shaped(white, var = quantum_slope*I + classical_noise_var)   [analog chain pole]
// + white(var = electronic_noise_var)                            [flat floor]
// + shaped(white, std = lowfreq.amplitude)                       [technical noise, laser on only]
// and is then quantized. Shaping filters are single-pole low-passes normalized
// to unit noise power gain, so configured variances are the actual signal
// variances.

#include "qrng/adc.hpp"

#include <cstdint>
#include <vector>

namespace qrng {

struct LowFreqNoise {
    double amplitude = 0.0;   // volts (std dev of the shaped technical noise)
    double cutoff = 50e6;     // Hz
};

struct SourceParams {
    double photocurrent = 70e-6;        // amperes, I_PD3
    double quantum_slope = 0.0;         // V^2/A per quadrature
    double classical_noise_var = 0.0;   // V^2, laser-on excess
    double electronic_noise_var = 0.0;  // V^2, laser-off floor
    LowFreqNoise lowfreq;
    double tia_bandwidth = 2.5e9;       // Hz, single-pole of the analog chain

    void validate() const;
};

/// Deterministic for (params, adc, n_samples, seed) under any thread count.
RawTrace simulate_trace(const SourceParams& params, const AdcSpec& adc,
                        size_t n_samples, uint64_t seed, unsigned threads = 0);

/// One trace per photocurrent, all other parameters fixed. Per-trace seeds are
/// derived from (seed, index).
std::vector<RawTrace> sweep_calibration(const SourceParams& params,
                                        const std::vector<double>& currents,
                                        const AdcSpec& adc, size_t n_samples,
                                        uint64_t seed, unsigned threads = 0);

/// EWMA coefficient of the discrete single-pole low-pass at `cutoff`.
double onepole_alpha(double cutoff, double sample_rate);

/// The operating point used throughout: parameters back-solved so that the
/// full pipeline lands on the published numbers (vacuum-unit variance 1.23 at
/// 70 uA, 17.5 extractable bits per pair, first ACF zero at lag 10).
struct PaperConfig {
    SourceParams source;
    AdcSpec adc;
    double band_low = 0.2e9;
    double band_high = 2.2e9;
    int filter_taps = 511;
};
PaperConfig paper_config();

} // namespace qrng
