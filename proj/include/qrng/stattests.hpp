#pragma once
// SP 800-22 style validation battery (eight-test subset) plus the
// before/after-hash autocorrelation comparison.

#include "qrng/bitvec.hpp"
#include "qrng/dsp.hpp"

#include <span>
#include <string>
#include <vector>

namespace qrng {
namespace sts {

/// Individual tests. Input is one bit per byte; all return p-values in [0,1].
double frequency(std::span<const uint8_t> bits);
double block_frequency(std::span<const uint8_t> bits, int block_len = 128);
/// forward = partial sums from the front, else from the back.
double cumulative_sums(std::span<const uint8_t> bits, bool forward);
double runs(std::span<const uint8_t> bits);
double longest_run(std::span<const uint8_t> bits);
double dft(std::span<const uint8_t> bits);
/// Returns the two Serial p-values (nabla psi^2 and nabla^2 psi^2).
std::pair<double, double> serial(std::span<const uint8_t> bits, int m = 0);
double approximate_entropy(std::span<const uint8_t> bits, int m = 0);

/// Chi-square over 10 bins -> igamc(9/2, chi2/2). pre: >= 10 p-values.
double uniformity_P(std::span<const double> p_values);

struct TestInstance {
    std::string name;             // e.g. "Serial-1"
    std::string category;         // e.g. "Serial"
    std::vector<double> p_values; // one per stream
    double uniformity = 0.0;
    double proportion = 0.0;      // fraction of streams with p >= alpha
    double prop_lo = 0.0, prop_hi = 1.0;
    bool passed = false;          // uniformity >= 1e-4 and proportion in band
};

struct TestReport {
    size_t stream_bits = 0;
    size_t n_streams = 0;
    double alpha = 0.01;
    std::vector<TestInstance> instances;
    bool all_passed = false;

    /// Table-style category rollup: lowest uniformity P across instances.
    struct CategoryRow {
        std::string name;
        double min_uniformity;
        bool passed;
    };
    std::vector<CategoryRow> by_category() const;
};

/// Splits `bits` into n_streams streams of stream_bits and runs the battery.
/// pre: bits.size() >= stream_bits * n_streams; stream_bits large enough for
/// the parameter regime (>= 6272 for the LongestRun tables).
TestReport run_battery(const BitVec& bits, size_t stream_bits, size_t n_streams,
                       double alpha = 0.01);

/// Autocorrelation of an analog-domain sequence next to the extracted bits
/// (mapped to +-1), both with the same 99% white-noise bound.
struct AcfComparison {
    dsp::AcfProfile before;
    dsp::AcfProfile after;
};
AcfComparison compare_acf(std::span<const double> before, const BitVec& after,
                          int max_lag);

} // namespace sts
} // namespace qrng
