#include "qrng/adc.hpp"
#include "qrng/errors.hpp"

#include <cmath>

namespace qrng {

void AdcSpec::validate() const {
    if (bits < 2 || bits > 16) throw Error("AdcSpec: bits must be in [2,16]");
    if (!(full_scale > 0) || !std::isfinite(full_scale)) throw Error("AdcSpec: full_scale must be positive");
    if (!(sample_rate > 0) || !std::isfinite(sample_rate)) throw Error("AdcSpec: sample_rate must be positive");
}

int32_t quantize(double v, const AdcSpec& adc) {
    // Saturation is defined behavior, including for non-finite inputs.
    if (std::isnan(v)) return 0;
    const double q = std::round(v / adc.lsb_volts());
    if (q >= static_cast<double>(adc.max_code())) return adc.max_code();
    if (q <= static_cast<double>(adc.min_code())) return adc.min_code();
    return static_cast<int32_t>(q);
}

} // namespace qrng
