// Carryless 64x64 -> 128 multiply kernels for the Toeplitz hash.
// This translation unit is compiled with -mpclmul; callers must gate on
// gf2_clmul_supported().

#include <cstdint>
#include <cstddef>

#if defined(__x86_64__) || defined(__i386__)
#include <wmmintrin.h>
#include <smmintrin.h>
#define QRNG_HAVE_CLMUL_BUILD 1
#endif

namespace qrng {
namespace ext {

bool gf2_clmul_supported() {
#if defined(QRNG_HAVE_CLMUL_BUILD)
    return __builtin_cpu_supports("pclmul");
#else
    return false;
#endif
}

#if defined(QRNG_HAVE_CLMUL_BUILD)

// acc ^= x * s restricted to output words [w_lo, w_hi).
// For fixed x-word a, cell b lands in words a+b (low half) and a+b+1 (high
// half); the high half of cell b and the low half of cell b+1 share a word,
// so a running carry gives one memory update per word.
void gf2_mul_acc_clmul(const uint64_t* x, size_t nx, const uint64_t* s, size_t ns,
                       uint64_t* acc, size_t w_lo, size_t w_hi) {
    for (size_t a = 0; a < nx; ++a) {
        const uint64_t xa = x[a];
        if (!xa) continue;
        const __m128i va = _mm_set_epi64x(0, static_cast<long long>(xa));

        size_t b = w_lo > a + 1 ? w_lo - a - 1 : 0;
        size_t b_end = w_hi > a ? w_hi - a : 0;
        if (b_end > ns) b_end = ns;
        if (b >= b_end) continue;

        uint64_t pending = 0;
        if (a + b == w_lo - 1) {
            // first cell only feeds its high half into the window
            const __m128i p = _mm_clmulepi64_si128(
                va, _mm_set_epi64x(0, static_cast<long long>(s[b])), 0x00);
            pending = static_cast<uint64_t>(_mm_extract_epi64(p, 1));
            ++b;
        }
        for (; b < b_end; ++b) {
            const __m128i p = _mm_clmulepi64_si128(
                va, _mm_set_epi64x(0, static_cast<long long>(s[b])), 0x00);
            acc[a + b] ^= static_cast<uint64_t>(_mm_cvtsi128_si64(p)) ^ pending;
            pending = static_cast<uint64_t>(_mm_extract_epi64(p, 1));
        }
        if (pending && a + b_end < w_hi) acc[a + b_end] ^= pending;
    }
}

#else

void gf2_mul_acc_clmul(const uint64_t*, size_t, const uint64_t*, size_t,
                       uint64_t*, size_t, size_t) {}

#endif

} // namespace ext
} // namespace qrng
