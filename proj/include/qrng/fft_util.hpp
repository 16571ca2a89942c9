#pragma once
// Thin FFTW wrappers (plan creation serialized; execution re-entrant).

#include <complex>
#include <span>
#include <vector>

namespace qrng {

/// Real-to-complex DFT, returns n/2+1 bins.
std::vector<std::complex<double>> rfft(std::span<const double> x);

/// FFT overlap-save "valid" convolution of x with kernel h (h.size() odd).
/// Identical output for any thread count (fixed segmentation, serial math).
std::vector<double> fft_convolve_valid(std::span<const double> x,
                                       std::span<const double> h);

} // namespace qrng
