#include "qrng/adc.hpp"
#include "qrng/errors.hpp"
#include "qrng/prng.hpp"

#include <doctest.h>

#include <cmath>

using namespace qrng;

TEST_CASE("mid-tread quantizer fixed points") {
    const AdcSpec adc{12, 0.8, 20e9};
    CHECK(quantize(0.0, adc) == 0);
    CHECK(quantize(adc.full_scale, adc) == 2047);      // saturates at max code
    CHECK(quantize(-adc.full_scale, adc) == -2048);
    CHECK(quantize(adc.lsb_volts(), adc) == 1);        // one LSB
    CHECK(quantize(-adc.lsb_volts(), adc) == -1);
    CHECK(quantize(0.49 * adc.lsb_volts(), adc) == 0);
    CHECK(quantize(0.51 * adc.lsb_volts(), adc) == 1);
}

TEST_CASE("quantization error bounded by half LSB in range") {
    const AdcSpec adc{12, 0.8, 20e9};
    const double lsb = adc.lsb_volts();
    GaussianStream g(7, 0);
    for (int i = 0; i < 20000; ++i) {
        const double v = 0.05 * g.at(i); // well inside full scale
        const int32_t c = quantize(v, adc);
        CHECK(std::abs(c * lsb - v) <= 0.5 * lsb + 1e-15);
    }
}

TEST_CASE("adc spec validation") {
    CHECK_THROWS_AS((AdcSpec{1, 0.8, 20e9}).validate(), Error);
    CHECK_THROWS_AS((AdcSpec{12, -1.0, 20e9}).validate(), Error);
    CHECK_THROWS_AS((AdcSpec{12, 0.8, 0.0}).validate(), Error);
    CHECK_NOTHROW((AdcSpec{12, 0.8, 20e9}).validate());
}
