#include "qrng/stattests.hpp"
#include "qrng/errors.hpp"
#include "qrng/fft_util.hpp"
#include "qrng/special.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace qrng {
namespace sts {
namespace {

double mean_ones(std::span<const uint8_t> bits) {
    size_t ones = 0;
    for (uint8_t b : bits) ones += b;
    return static_cast<double>(ones) / static_cast<double>(bits.size());
}

int serial_default_m(size_t n) {
    // largest m with m < log2(n) - 2, capped at the usual 16
    int m = static_cast<int>(std::floor(std::log2(static_cast<double>(n)))) - 3;
    return std::clamp(m, 2, 16);
}

int apen_default_m(size_t n) {
    // NIST guideline m < log2(n) - 5, capped at the usual 10
    int m = static_cast<int>(std::floor(std::log2(static_cast<double>(n)))) - 6;
    return std::clamp(m, 2, 10);
}

// Overlapping m-pattern counts with wrap-around.
std::vector<uint32_t> pattern_counts(std::span<const uint8_t> bits, int m) {
    const size_t n = bits.size();
    std::vector<uint32_t> counts(size_t(1) << m, 0);
    uint32_t v = 0;
    const uint32_t mask = (uint32_t(1) << m) - 1;
    for (int i = 0; i < m - 1; ++i) v = (v << 1) | bits[i];
    for (size_t i = 0; i < n; ++i) {
        const uint8_t next = bits[(i + m - 1) % n];
        v = ((v << 1) | next) & mask;
        counts[v]++;
    }
    return counts;
}

double psi_sq(std::span<const uint8_t> bits, int m) {
    if (m <= 0) return 0.0;
    const auto counts = pattern_counts(bits, m);
    double s = 0.0;
    for (uint32_t c : counts) s += static_cast<double>(c) * static_cast<double>(c);
    const double n = static_cast<double>(bits.size());
    return std::pow(2.0, m) / n * s - n;
}

double phi_m(std::span<const uint8_t> bits, int m) {
    const auto counts = pattern_counts(bits, m);
    const double n = static_cast<double>(bits.size());
    double s = 0.0;
    for (uint32_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / n;
        s += p * std::log(p);
    }
    return s;
}

} // namespace

double frequency(std::span<const uint8_t> bits) {
    const double n = static_cast<double>(bits.size());
    double s = 0.0;
    for (uint8_t b : bits) s += b ? 1.0 : -1.0;
    return std::erfc(std::abs(s) / std::sqrt(n) / std::sqrt(2.0));
}

double block_frequency(std::span<const uint8_t> bits, int block_len) {
    const size_t M = static_cast<size_t>(block_len);
    const size_t N = bits.size() / M;
    if (N == 0) throw Error("block_frequency: stream shorter than one block");
    double chi2 = 0.0;
    for (size_t b = 0; b < N; ++b) {
        size_t ones = 0;
        for (size_t i = 0; i < M; ++i) ones += bits[b * M + i];
        const double pi = static_cast<double>(ones) / static_cast<double>(M);
        chi2 += (pi - 0.5) * (pi - 0.5);
    }
    chi2 *= 4.0 * static_cast<double>(M);
    return sf::igamc(static_cast<double>(N) / 2.0, chi2 / 2.0);
}

double cumulative_sums(std::span<const uint8_t> bits, bool forward) {
    const size_t n = bits.size();
    double s = 0.0, z = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const uint8_t b = forward ? bits[i] : bits[n - 1 - i];
        s += b ? 1.0 : -1.0;
        z = std::max(z, std::abs(s));
    }
    if (z == 0.0) return 0.0;
    const double sqn = std::sqrt(static_cast<double>(n));
    const double nd = static_cast<double>(n);
    double t1 = 0.0, t2 = 0.0;
    for (long k = static_cast<long>(std::floor((-nd / z + 1) / 4));
         k <= static_cast<long>(std::floor((nd / z - 1) / 4)); ++k) {
        t1 += sf::normal_cdf((4.0 * k + 1) * z / sqn) - sf::normal_cdf((4.0 * k - 1) * z / sqn);
    }
    for (long k = static_cast<long>(std::floor((-nd / z - 3) / 4));
         k <= static_cast<long>(std::floor((nd / z - 1) / 4)); ++k) {
        t2 += sf::normal_cdf((4.0 * k + 3) * z / sqn) - sf::normal_cdf((4.0 * k + 1) * z / sqn);
    }
    return std::clamp(1.0 - t1 + t2, 0.0, 1.0);
}

double runs(std::span<const uint8_t> bits) {
    const double n = static_cast<double>(bits.size());
    const double pi = mean_ones(bits);
    if (std::abs(pi - 0.5) >= 2.0 / std::sqrt(n)) return 0.0; // NIST prerequisite
    double v = 1.0;
    for (size_t i = 1; i < bits.size(); ++i)
        if (bits[i] != bits[i - 1]) v += 1.0;
    return std::erfc(std::abs(v - 2.0 * n * pi * (1.0 - pi)) /
                     (2.0 * std::sqrt(2.0 * n) * pi * (1.0 - pi)));
}

double longest_run(std::span<const uint8_t> bits) {
    const size_t n = bits.size();
    size_t M;
    int K;
    std::vector<double> pi;
    std::vector<int> vclass; // upper bounds of classes, last is open
    if (n < 6272) {
        if (n < 128) throw Error("longest_run: need at least 128 bits");
        M = 8;
        K = 3;
        pi = {0.21484375, 0.3671875, 0.23046875, 0.1875};
        vclass = {1, 2, 3};
    } else if (n < 750000) {
        M = 128;
        K = 5;
        pi = {0.1174035788, 0.242955959, 0.249363483, 0.17517706, 0.102701071, 0.112398847};
        vclass = {4, 5, 6, 7, 8};
    } else {
        M = 10000;
        K = 6;
        pi = {0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727};
        vclass = {10, 11, 12, 13, 14, 15};
    }
    const size_t N = n / M;
    std::vector<double> nu(K + 1, 0.0);
    for (size_t b = 0; b < N; ++b) {
        int longest = 0, cur = 0;
        for (size_t i = 0; i < M; ++i) {
            if (bits[b * M + i]) {
                ++cur;
                longest = std::max(longest, cur);
            } else {
                cur = 0;
            }
        }
        int cls = K;
        for (int c = 0; c < K; ++c) {
            if (longest <= vclass[c]) {
                cls = c;
                break;
            }
        }
        nu[cls] += 1.0;
    }
    double chi2 = 0.0;
    for (int c = 0; c <= K; ++c) {
        const double e = static_cast<double>(N) * pi[c];
        chi2 += (nu[c] - e) * (nu[c] - e) / e;
    }
    return sf::igamc(static_cast<double>(K) / 2.0, chi2 / 2.0);
}

double dft(std::span<const uint8_t> bits) {
    const size_t n = bits.size();
    std::vector<double> x(n);
    for (size_t i = 0; i < n; ++i) x[i] = bits[i] ? 1.0 : -1.0;
    const auto spec = rfft(x);
    const double T = std::sqrt(std::log(1.0 / 0.05) * static_cast<double>(n));
    const size_t half = n / 2;
    double n1 = 0.0;
    for (size_t k = 0; k < half; ++k)
        if (std::abs(spec[k]) < T) n1 += 1.0;
    const double n0 = 0.95 * static_cast<double>(half);
    const double d = (n1 - n0) / std::sqrt(static_cast<double>(n) * 0.95 * 0.05 / 4.0);
    return std::erfc(std::abs(d) / std::sqrt(2.0));
}

std::pair<double, double> serial(std::span<const uint8_t> bits, int m) {
    if (m <= 0) m = serial_default_m(bits.size());
    const double p0 = psi_sq(bits, m);
    const double p1 = psi_sq(bits, m - 1);
    const double p2 = psi_sq(bits, m - 2);
    const double d1 = p0 - p1;
    const double d2 = p0 - 2.0 * p1 + p2;
    return {sf::igamc(std::pow(2.0, m - 2), d1 / 2.0),
            sf::igamc(std::pow(2.0, m - 3), d2 / 2.0)};
}

double approximate_entropy(std::span<const uint8_t> bits, int m) {
    if (m <= 0) m = apen_default_m(bits.size());
    const double n = static_cast<double>(bits.size());
    const double ap_en = phi_m(bits, m) - phi_m(bits, m + 1);
    const double chi2 = 2.0 * n * (std::log(2.0) - ap_en);
    return sf::igamc(std::pow(2.0, m - 1), chi2 / 2.0);
}

double uniformity_P(std::span<const double> p_values) {
    if (p_values.size() < 10) throw Error("uniformity_P: need at least 10 p-values");
    double bins[10] = {0};
    for (double p : p_values) {
        int b = static_cast<int>(p * 10.0);
        b = std::clamp(b, 0, 9);
        bins[b] += 1.0;
    }
    const double e = static_cast<double>(p_values.size()) / 10.0;
    double chi2 = 0.0;
    for (double c : bins) chi2 += (c - e) * (c - e) / e;
    return sf::igamc(9.0 / 2.0, chi2 / 2.0);
}

std::vector<TestReport::CategoryRow> TestReport::by_category() const {
    std::vector<CategoryRow> rows;
    std::map<std::string, size_t> idx;
    for (const auto& inst : instances) {
        auto it = idx.find(inst.category);
        if (it == idx.end()) {
            idx[inst.category] = rows.size();
            rows.push_back({inst.category, inst.uniformity, inst.passed});
        } else {
            auto& row = rows[it->second];
            row.min_uniformity = std::min(row.min_uniformity, inst.uniformity);
            row.passed = row.passed && inst.passed;
        }
    }
    return rows;
}

TestReport run_battery(const BitVec& bits, size_t stream_bits, size_t n_streams,
                       double alpha) {
    if (bits.size() < stream_bits * n_streams)
        throw Error("run_battery: insufficient data for requested streams");
    if (stream_bits < 6272)
        throw Error("run_battery: stream_bits must be >= 6272");

    TestReport rep;
    rep.stream_bits = stream_bits;
    rep.n_streams = n_streams;
    rep.alpha = alpha;

    struct Inst {
        std::string name, cat;
    };
    const std::vector<Inst> insts = {
        {"Frequency", "Frequency"},
        {"BlockFrequency", "BlockFrequency"},
        {"CumulativeSums-fwd", "CumulativeSums"},
        {"CumulativeSums-rev", "CumulativeSums"},
        {"Runs", "Runs"},
        {"LongestRun", "LongestRun"},
        {"DFT", "DFT"},
        {"Serial-1", "Serial"},
        {"Serial-2", "Serial"},
        {"ApproximateEntropy", "ApproximateEntropy"},
    };
    std::vector<std::vector<double>> pv(insts.size());
    for (auto& v : pv) v.reserve(n_streams);

    std::vector<uint8_t> stream(stream_bits);
    for (size_t s = 0; s < n_streams; ++s) {
        const size_t base = s * stream_bits;
        for (size_t i = 0; i < stream_bits; ++i) stream[i] = bits.get(base + i) ? 1 : 0;
        std::span<const uint8_t> sp(stream);
        pv[0].push_back(frequency(sp));
        pv[1].push_back(block_frequency(sp));
        pv[2].push_back(cumulative_sums(sp, true));
        pv[3].push_back(cumulative_sums(sp, false));
        pv[4].push_back(runs(sp));
        pv[5].push_back(longest_run(sp));
        pv[6].push_back(dft(sp));
        const auto ser = serial(sp);
        pv[7].push_back(ser.first);
        pv[8].push_back(ser.second);
        pv[9].push_back(approximate_entropy(sp));
    }

    const double p_hat = 1.0 - alpha;
    const double band = 3.0 * std::sqrt(p_hat * alpha / static_cast<double>(n_streams));
    rep.all_passed = true;
    for (size_t i = 0; i < insts.size(); ++i) {
        TestInstance ti;
        ti.name = insts[i].name;
        ti.category = insts[i].cat;
        ti.p_values = std::move(pv[i]);
        ti.uniformity = n_streams >= 10 ? uniformity_P(ti.p_values) : 1.0;
        size_t pass = 0;
        for (double p : ti.p_values)
            if (p >= alpha) ++pass;
        ti.proportion = static_cast<double>(pass) / static_cast<double>(n_streams);
        ti.prop_lo = p_hat - band;
        ti.prop_hi = std::min(1.0, p_hat + band);
        ti.passed = ti.uniformity >= 1e-4 && ti.proportion >= ti.prop_lo &&
                    ti.proportion <= ti.prop_hi;
        rep.all_passed = rep.all_passed && ti.passed;
        rep.instances.push_back(std::move(ti));
    }
    return rep;
}

AcfComparison compare_acf(std::span<const double> before, const BitVec& after,
                          int max_lag) {
    std::vector<double> mapped(after.size());
    for (size_t i = 0; i < after.size(); ++i) mapped[i] = after.get(i) ? 1.0 : -1.0;
    AcfComparison c;
    c.before = dsp::autocorrelation(before, max_lag);
    c.after = dsp::autocorrelation(mapped, max_lag);
    return c;
}

} // namespace sts
} // namespace qrng
