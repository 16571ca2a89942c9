#include "qrng/prng.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace qrng;

TEST_CASE("philox4x64-10 reference vectors") {
    // Generated with numpy.random.Philox (same Random123 algorithm).
    auto r = Philox4x64::block({0, 0, 0, 0}, {0, 0});
    CHECK(r[0] == 0x16554d9eca36314cULL);
    CHECK(r[1] == 0xdb20fe9d672d0fdcULL);
    CHECK(r[2] == 0xd7e772cee186176bULL);
    CHECK(r[3] == 0x7e68b68aec7ba23bULL);

    r = Philox4x64::block({1, 2, 3, 4}, {5, 6});
    CHECK(r[0] == 0xa39b5519339fe354ULL);
    CHECK(r[1] == 0xaceb1228efc25196ULL);
    CHECK(r[2] == 0xa0a2e3c25aa5f4fcULL);
    CHECK(r[3] == 0x08d0cfa9332720dfULL);

    const uint64_t f = ~uint64_t(0);
    r = Philox4x64::block({f, f, f, f}, {f, f});
    CHECK(r[0] == 0x87b092c3013fe90bULL);
    CHECK(r[1] == 0x438c3c67be8d0224ULL);
    CHECK(r[2] == 0x9cc7d7c69cd777b6ULL);
    CHECK(r[3] == 0xa09caebf594f0ba0ULL);

    r = Philox4x64::block({0x243f6a8885a308d3ULL, 0x13198a2e03707344ULL,
                           0xa4093822299f31d0ULL, 0x082efa98ec4e6c89ULL},
                          {0x452821e638d01377ULL, 0xbe5466cf34e90c6cULL});
    CHECK(r[0] == 0xa528f45403e61d95ULL);
    CHECK(r[1] == 0x38c72dbd566e9788ULL);
    CHECK(r[2] == 0xa5a1610e72fd18b5ULL);
    CHECK(r[3] == 0x57bd43b5e52b7fe6ULL);
}

TEST_CASE("gaussian stream is position addressable") {
    GaussianStream a(42, 7);
    std::vector<double> fwd(100);
    for (int i = 0; i < 100; ++i) fwd[i] = a.at(i);

    GaussianStream b(42, 7);
    for (int i = 99; i >= 0; --i) CHECK(b.at(i) == fwd[i]);

    GaussianStream c(43, 7);
    CHECK(c.at(0) != fwd[0]);
    GaussianStream d(42, 8);
    CHECK(d.at(0) != fwd[0]);
}

TEST_CASE("gaussian moments") {
    GaussianStream g(123, 0);
    const int n = 200000;
    double s = 0, s2 = 0, s3 = 0, s4 = 0;
    for (int i = 0; i < n; ++i) {
        const double x = g.at(i);
        s += x;
        s2 += x * x;
        s3 += x * x * x;
        s4 += x * x * x * x;
    }
    CHECK(std::abs(s / n) < 1e-2);
    CHECK(s2 / n == doctest::Approx(1.0).epsilon(0.01));
    CHECK(std::abs(s3 / n) < 3e-2);
    CHECK(s4 / n == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("philox_u64 varies across all indices") {
    CHECK(philox_u64(1, 2, 3) != philox_u64(1, 2, 4));
    CHECK(philox_u64(1, 2, 3) != philox_u64(1, 3, 3));
    CHECK(philox_u64(1, 2, 3) != philox_u64(2, 2, 3));
    CHECK(philox_u64(1, 2, 3) == philox_u64(1, 2, 3));
}
