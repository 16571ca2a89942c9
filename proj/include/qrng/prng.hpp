#pragma once
// Counter-based PRNG (Philox4x64-10) and Gaussian noise streams.
//
// Every draw is addressed by (seed, stream id, sample index), so chunks of a
// trace can be generated on any thread in any order and still come out
// byte-identical. Period is 2^256 counters per key.

#include <array>
#include <cstdint>
#include <cmath>

namespace qrng {

struct Philox4x64 {
    // Random123 / numpy constants.
    static constexpr uint64_t M0 = 0xD2E7470EE14C6C93ULL;
    static constexpr uint64_t M1 = 0xCA5A826395121157ULL;
    static constexpr uint64_t W0 = 0x9E3779B97F4A7C15ULL;
    static constexpr uint64_t W1 = 0xBB67AE8584CAA73BULL;

    static std::array<uint64_t, 4> block(const std::array<uint64_t, 4>& counter,
                                         const std::array<uint64_t, 2>& key);
};

// Uniform double in (0, 1), 53 significant bits, never exactly 0 or 1.
inline double u64_to_unit_double(uint64_t x) {
    return static_cast<double>(x >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

/// Position-addressable stream of standard Gaussian deviates.
///
/// One Philox block yields four uniforms = four Box-Muller deviates; deviate i
/// lives in block i/4 and is reproducible independently of access order.
class GaussianStream {
public:
    GaussianStream(uint64_t seed, uint64_t stream_id)
        : key_{seed, 0x7120B47D3D7BAC4BULL}, stream_id_(stream_id) {}

    double at(uint64_t index) {
        const uint64_t blk = index >> 2;
        if (blk != cached_block_ || !valid_) fill(blk);
        return vals_[index & 3];
    }

private:
    void fill(uint64_t blk) {
        auto r = Philox4x64::block({blk, stream_id_, 0, 0}, key_);
        const double u0 = u64_to_unit_double(r[0]);
        const double u1 = u64_to_unit_double(r[1]);
        const double u2 = u64_to_unit_double(r[2]);
        const double u3 = u64_to_unit_double(r[3]);
        const double m0 = std::sqrt(-2.0 * std::log(u0));
        const double m1 = std::sqrt(-2.0 * std::log(u2));
        constexpr double tau = 6.283185307179586476925287;
        vals_[0] = m0 * std::cos(tau * u1);
        vals_[1] = m0 * std::sin(tau * u1);
        vals_[2] = m1 * std::cos(tau * u3);
        vals_[3] = m1 * std::sin(tau * u3);
        cached_block_ = blk;
        valid_ = true;
    }

    std::array<uint64_t, 2> key_;
    uint64_t stream_id_;
    uint64_t cached_block_ = 0;
    bool valid_ = false;
    double vals_[4] = {0, 0, 0, 0};
};

/// Deterministic uniform u64 stream addressed by (seed, stream, index).
uint64_t philox_u64(uint64_t seed, uint64_t stream_id, uint64_t index);

} // namespace qrng
