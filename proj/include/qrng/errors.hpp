#pragma once
#include <stdexcept>
#include <string>

namespace qrng {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Entropy bound gives no positive number of extractable bits.
struct NoCertifiableRandomness : Error {
    NoCertifiableRandomness() : Error("no certifiable randomness") {}
};

} // namespace qrng
