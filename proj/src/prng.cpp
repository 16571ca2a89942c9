#include "qrng/prng.hpp"

namespace qrng {
namespace {

inline void mul_hilo(uint64_t a, uint64_t b, uint64_t& hi, uint64_t& lo) {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<uint64_t>(p >> 64);
    lo = static_cast<uint64_t>(p);
}

inline void round_once(std::array<uint64_t, 4>& c, const std::array<uint64_t, 2>& k) {
    uint64_t hi0, lo0, hi1, lo1;
    mul_hilo(c[0], Philox4x64::M0, hi0, lo0);
    mul_hilo(c[2], Philox4x64::M1, hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

} // namespace

std::array<uint64_t, 4> Philox4x64::block(const std::array<uint64_t, 4>& counter,
                                          const std::array<uint64_t, 2>& key) {
    std::array<uint64_t, 4> c = counter;
    std::array<uint64_t, 2> k = key;
    for (int r = 0; r < 10; ++r) {
        if (r > 0) {
            k[0] += W0;
            k[1] += W1;
        }
        round_once(c, k);
    }
    return c;
}

uint64_t philox_u64(uint64_t seed, uint64_t stream_id, uint64_t index) {
    auto r = Philox4x64::block({index >> 2, stream_id, 1, 0}, {seed, 0x9BF09ACB3FD0E54FULL});
    return r[index & 3];
}

} // namespace qrng
