// Extractor benchmark harness: raw-input throughput of the Toeplitz hash at
// the production dimensions, plus a sweep over block sizes.

#include "qrng/toeplitz.hpp"

#include <cstdio>
#include <cstdlib>

using namespace qrng;

int main(int argc, char** argv) {
    size_t mbits = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 64;
    std::printf("kernel: %s\n", ext::fast_kernel_available() ? "clmul" : "portable");

    struct Dim {
        size_t n, m;
    };
    const Dim dims[] = {{15000, 10788}, {15000, 10811}, {3000, 2157}, {60000, 43152}};
    for (const auto& d : dims) {
        auto spec = ext::ToeplitzSpec::make(d.n, d.m,
                                            ext::expand_seed_bits(1, d.n + d.m - 1));
        ext::measure_throughput(spec, 1 << 22); // warm-up
        const double bps = ext::measure_throughput(spec, mbits << 20);
        std::printf("n=%6zu m=%6zu : %8.1f Mbit/s raw in, %8.1f Mbit/s out\n", d.n, d.m,
                    bps / 1e6, bps / 1e6 * double(d.m) / double(d.n));
    }
    return 0;
}
