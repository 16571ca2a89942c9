#include "qrng/stattests.hpp"
#include "qrng/errors.hpp"
#include "qrng/prng.hpp"
#include "qrng/special.hpp"

#include <doctest.h>

#include <cmath>
#include <string>

using namespace qrng;
using namespace qrng::sts;

namespace {

// Binary expansion of pi including the integer part: 11.001001...
const std::string kPiBits100 =
    "1100100100001111110110101010001000100001011010001100"
    "001000110100110001001100011001100010100010111000";

std::vector<uint8_t> bits_of(const std::string& s) {
    std::vector<uint8_t> v(s.size());
    for (size_t i = 0; i < s.size(); ++i) v[i] = s[i] == '1';
    return v;
}

std::vector<uint8_t> prng_bits(uint64_t seed, size_t n, uint64_t stream = 0) {
    std::vector<uint8_t> v(n);
    for (size_t i = 0; i < n; ++i) {
        const uint64_t w = philox_u64(seed, stream, i / 64);
        v[i] = (w >> (i % 64)) & 1u;
    }
    return v;
}

} // namespace

TEST_CASE("igamc reference values") {
    // frozen against an independent arbitrary-precision evaluation
    CHECK(sf::igamc(0.5, 0.25) == doctest::Approx(0.47950012218695348).epsilon(1e-10));
    CHECK(sf::igamc(1.0, 2.0) == doctest::Approx(0.13533528323661269).epsilon(1e-10));
    CHECK(sf::igamc(3.0, 2.5) == doctest::Approx(0.54381311588332952).epsilon(1e-10));
    CHECK(sf::igamc(4.5, 4.5) == doctest::Approx(0.43727418891386705).epsilon(1e-10));
    CHECK(sf::igamc(4.5, 0.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(sf::igamc(0.5, 12.0) == doctest::Approx(9.6335700864309459e-7).epsilon(1e-10));
    CHECK(sf::igamc(30.5, 25.0) == doctest::Approx(0.8417330395406819).epsilon(1e-10));
    CHECK(sf::igamc(2048.0, 2000.0) == doctest::Approx(0.85580984423882098).epsilon(1e-10));
    CHECK(sf::igamc(8192.0, 8300.0) == doctest::Approx(0.11668596970853692).epsilon(1e-10));
    CHECK(sf::igamc(16384.0, 16300.0) == doctest::Approx(0.74369194765042998).epsilon(1e-10));
    CHECK(sf::igamc(0.5, 1e-3) == doctest::Approx(std::erfc(std::sqrt(1e-3))).epsilon(1e-12));
    CHECK_THROWS_AS(sf::igamc(-1.0, 1.0), Error);
}

TEST_CASE("published worked examples") {
    const auto pi100 = bits_of(kPiBits100);
    CHECK(frequency(pi100) == doctest::Approx(0.109598583399116).epsilon(1e-9));
    CHECK(runs(pi100) == doctest::Approx(0.5007979178870903).epsilon(1e-9));
    CHECK(cumulative_sums(pi100, true) == doctest::Approx(0.21919399348562665).epsilon(1e-9));

    CHECK(block_frequency(bits_of("0110011010"), 3) ==
          doctest::Approx(0.8012519569012009).epsilon(1e-9));

    const auto ser = serial(bits_of("0011011101"), 3);
    CHECK(ser.first == doctest::Approx(0.8087921354109989).epsilon(1e-9));
    CHECK(ser.second == doctest::Approx(0.6703200460356398).epsilon(1e-9));

    CHECK(approximate_entropy(bits_of("0100110101"), 3) ==
          doctest::Approx(0.2619611048816657).epsilon(1e-9));
}

TEST_CASE("degenerate streams fail loudly") {
    std::vector<uint8_t> zeros(100000, 0);
    CHECK(frequency(zeros) < 1e-10);
    std::vector<uint8_t> alt(100000);
    for (size_t i = 0; i < alt.size(); ++i) alt[i] = i & 1;
    CHECK(runs(alt) < 1e-10);          // maximal number of runs
    CHECK(frequency(alt) == doctest::Approx(1.0)); // but perfectly balanced
}

TEST_CASE("uniformity_P fixed points") {
    std::vector<double> exact;
    for (int b = 0; b < 10; ++b)
        for (int r = 0; r < 5; ++r) exact.push_back(b / 10.0 + 0.05);
    CHECK(uniformity_P(exact) == doctest::Approx(1.0).epsilon(1e-12)); // chi2 = 0

    std::vector<double> spike(1000, 0.5);
    CHECK(uniformity_P(spike) < 1e-4);

    std::vector<double> uni(1000);
    for (size_t i = 0; i < uni.size(); ++i)
        uni[i] = u64_to_unit_double(philox_u64(5, 9, i));
    CHECK(uniformity_P(uni) >= 1e-4);

    std::vector<double> few{0.5, 0.6};
    CHECK_THROWS_AS(uniformity_P(few), Error);
}

TEST_CASE("battery on a good PRNG passes; degenerate input fails") {
    const size_t stream_bits = 20000, n_streams = 40;
    BitVec good(stream_bits * n_streams);
    for (size_t w = 0; w < good.word_count(); ++w)
        good.words()[w] = philox_u64(101, 42, w);
    good.mask_tail();
    const auto rep = run_battery(good, stream_bits, n_streams, 0.01);
    CHECK(rep.all_passed);
    CHECK(rep.instances.size() == 10);

    BitVec zeros(stream_bits * n_streams);
    const auto bad = run_battery(zeros, stream_bits, n_streams, 0.01);
    CHECK_FALSE(bad.all_passed);
    for (const auto& inst : bad.instances)
        if (inst.category == "Frequency") CHECK(inst.p_values[0] < 1e-10);

    CHECK_THROWS_AS(run_battery(good, stream_bits, n_streams * 10, 0.01), Error);
}

TEST_CASE("battery verdicts are deterministic") {
    const size_t stream_bits = 10000, n_streams = 12;
    BitVec bits(stream_bits * n_streams);
    for (size_t w = 0; w < bits.word_count(); ++w)
        bits.words()[w] = philox_u64(77, 1, w);
    bits.mask_tail();
    const auto a = run_battery(bits, stream_bits, n_streams, 0.01);
    const auto b = run_battery(bits, stream_bits, n_streams, 0.01);
    REQUIRE(a.instances.size() == b.instances.size());
    for (size_t i = 0; i < a.instances.size(); ++i) {
        CHECK(a.instances[i].p_values == b.instances[i].p_values);
        CHECK(a.instances[i].passed == b.instances[i].passed);
    }
}

TEST_CASE("p-values of every test are uniform on an ideal source") {
    // KS distance over 1000 streams < 0.05 per instance
    const size_t n_streams = 1000, stream_bits = 200000;
    BitVec bits(stream_bits * n_streams);
    for (size_t w = 0; w < bits.word_count(); ++w)
        bits.words()[w] = philox_u64(300, 8, w);
    bits.mask_tail();
    const auto rep = run_battery(bits, stream_bits, n_streams, 0.01);
    for (const auto& inst : rep.instances) {
        const double d = sf::ks_uniform_distance(inst.p_values.data(), inst.p_values.size());
        INFO(inst.name);
        CHECK(d < 0.05);
    }
}

TEST_CASE("gaussian-to-uniform reduction of the simulator PRNG is random") {
    // map deviates back to uniforms through the normal CDF, take the median bit
    GaussianStream g(20260809, 0);
    const size_t n = 1000000;
    std::vector<uint8_t> bits(n);
    for (size_t i = 0; i < n; ++i) {
        const double u = sf::normal_cdf(g.at(i));
        bits[i] = u < 0.5 ? 0 : 1;
    }
    CHECK(frequency(bits) >= 1e-4);
    CHECK(block_frequency(bits) >= 1e-4);
    CHECK(cumulative_sums(bits, true) >= 1e-4);
    CHECK(cumulative_sums(bits, false) >= 1e-4);
    CHECK(runs(bits) >= 1e-4);
    CHECK(longest_run(bits) >= 1e-4);
    CHECK(dft(bits) >= 1e-4);
    const auto ser = serial(bits);
    CHECK(ser.first >= 1e-4);
    CHECK(ser.second >= 1e-4);
    CHECK(approximate_entropy(bits) >= 1e-4);
}

TEST_CASE("table rollup reports the lowest P per category") {
    const size_t stream_bits = 10000, n_streams = 12;
    BitVec bits(stream_bits * n_streams);
    for (size_t w = 0; w < bits.word_count(); ++w)
        bits.words()[w] = philox_u64(55, 3, w);
    bits.mask_tail();
    const auto rep = run_battery(bits, stream_bits, n_streams, 0.01);
    const auto rows = rep.by_category();
    CHECK(rows.size() == 8); // CumulativeSums and Serial fold into one row each
    for (const auto& row : rows) {
        double min_p = 2.0;
        for (const auto& inst : rep.instances)
            if (inst.category == row.name) min_p = std::min(min_p, inst.uniformity);
        CHECK(row.min_uniformity == doctest::Approx(min_p));
    }
}

TEST_CASE("compare_acf flags an injected sampler artifact at lag 2") {
    const size_t n = 1 << 17;
    GaussianStream g(9, 0);
    std::vector<double> clean(n);
    for (size_t i = 0; i < n; ++i) clean[i] = g.at(i);
    // inject correlation at lag 2 around 4x the 99% bound
    const double bound = 2.5758 / std::sqrt(double(n));
    const double c = 4.0 * bound;
    std::vector<double> before(n);
    before[0] = clean[0];
    before[1] = clean[1];
    for (size_t i = 2; i < n; ++i) before[i] = clean[i] + c * before[i - 2];

    BitVec after(n);
    for (size_t w = 0; w < after.word_count(); ++w)
        after.words()[w] = philox_u64(200, 1, w);
    after.mask_tail();

    const auto cmp = compare_acf(before, after, 100);
    CHECK(std::abs(cmp.before.values[2]) > cmp.before.bound99);
    size_t inside = 0;
    for (int k = 1; k <= 100; ++k)
        if (std::abs(cmp.after.values[k]) < cmp.after.bound99) ++inside;
    CHECK(inside >= 98);

    // identical inputs give identical profiles
    const auto same = compare_acf(before, after, 10);
    const auto same2 = compare_acf(before, after, 10);
    CHECK(same.before.values == same2.before.values);
    CHECK(same.after.values == same2.after.values);
}
