#pragma once
// Toeplitz universal-hash randomness extraction with leftover-hash accounting.
//
// T is m x n over GF(2) with T[i][j] = seed[i - j + n - 1]: first row is
// seed[n-1..0], first column seed[n-1..n+m-2]. The product T*x equals the
// middle coefficients of the carryless polynomial product x(z)*seed(z), which
// is what the fast path computes (CLMUL when available).

#include "qrng/bitvec.hpp"

#include <cstdint>
#include <optional>

namespace qrng {
namespace ext {

/// Leftover-hash security exponent: eps = 2^-eps_exp for an n-bit block
/// carrying n*h_min/raw_bits bits of conditional min-entropy hashed to m bits.
double eps_exponent(size_t n, size_t m, double h_min, int raw_bits);

/// Largest m with m/n < h_min/raw_bits (strict) and eps_exponent >= target.
/// pre: 0 < h_min <= raw_bits, n a multiple of raw_bits.
/// Throws Error carrying the best achievable exponent when infeasible.
size_t choose_output_bits(double h_min, int raw_bits, size_t n, double target_eps_exp);

struct ToeplitzSpec {
    size_t n = 0;           // input block bits
    size_t m = 0;           // output block bits
    BitVec seed;            // n + m - 1 bits
    double epsilon_exp = 0; // -log2(security parameter), if budget known

    /// Validates 0 < m < n and seed length; when h_min is given, also the
    /// ratio condition m/n < h_min/raw_bits (override for experiments only).
    static ToeplitzSpec make(size_t n, size_t m, BitVec seed,
                             std::optional<double> h_min = std::nullopt,
                             int raw_bits = 24, bool allow_insecure = false);
};

/// Deterministic seed-bit expansion from a 64-bit master seed.
BitVec expand_seed_bits(uint64_t master_seed, size_t nbits);

/// One block: input n bits -> output m bits. Bit-exact contract; the fast
/// path is checked against the naive GF(2) product in the test suite.
BitVec toeplitz_hash(const ToeplitzSpec& spec, const BitVec& block);

/// Consecutive n-bit blocks, same seed, trailing partial block dropped,
/// outputs concatenated in block order regardless of thread count.
BitVec extract_stream(const BitVec& bits, const ToeplitzSpec& spec, unsigned threads = 0);

/// True when the CLMUL kernel is compiled in and the CPU supports it.
bool fast_kernel_available();

/// Test hook: pin the hash to the portable kernel (or back to the default).
void force_portable_kernel(bool portable);

/// Raw-input throughput of the block hash in bits/s (single thread).
double measure_throughput(const ToeplitzSpec& spec, size_t total_input_bits);

} // namespace ext
} // namespace qrng
