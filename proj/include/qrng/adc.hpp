#pragma once
#include <cstdint>
#include <vector>

namespace qrng {

/// Single-ended ADC model: N-bit mid-tread quantizer over a full-scale span.
struct AdcSpec {
    int bits = 12;               // N
    double full_scale = 0.8;     // R_adc, volts across the span
    double sample_rate = 20e9;   // samples/s

    void validate() const;       // bits >= 2, full_scale > 0, sample_rate > 0

    double lsb_volts() const { return full_scale / static_cast<double>(1 << bits); }
    int32_t max_code() const { return (1 << (bits - 1)) - 1; }
    int32_t min_code() const { return -(1 << (bits - 1)); }
};

/// Mid-tread uniform quantizer: code 0 at 0 V, step R_adc/2^N, saturating.
int32_t quantize(double v, const AdcSpec& adc);

/// Raw two-quadrature capture. Codes are stored as int16 regardless of N<=16.
struct RawTrace {
    std::vector<int16_t> p_codes;
    std::vector<int16_t> q_codes;
    AdcSpec adc;
    double photocurrent = 0.0;   // amperes at PD3
    uint64_t seed = 0;

    size_t size() const { return p_codes.size(); }
};

} // namespace qrng
