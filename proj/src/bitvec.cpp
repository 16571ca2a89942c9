#include "qrng/bitvec.hpp"
#include "qrng/errors.hpp"

#include <cstring>

namespace qrng {

BitVec BitVec::from_string(const std::string& s) {
    BitVec v(s.size());
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '1') v.set(i, true);
        else if (s[i] != '0') throw Error("BitVec::from_string: invalid character");
    }
    return v;
}

BitVec BitVec::from_bytes(std::span<const uint8_t> bytes, size_t nbits) {
    if (bytes.size() * 8 < nbits) throw Error("BitVec::from_bytes: too few bytes");
    BitVec v(nbits);
    std::memcpy(v.words_.data(), bytes.data(), (nbits + 7) / 8);
    v.mask_tail();
    return v;
}

std::vector<uint8_t> BitVec::to_bytes() const {
    std::vector<uint8_t> out((nbits_ + 7) / 8, 0);
    std::memcpy(out.data(), words_.data(), out.size());
    if (nbits_ & 7) {
        const uint8_t keep = static_cast<uint8_t>((1u << (nbits_ & 7)) - 1);
        out.back() &= keep;
    }
    return out;
}

std::string BitVec::to_string() const {
    std::string s(nbits_, '0');
    for (size_t i = 0; i < nbits_; ++i)
        if (get(i)) s[i] = '1';
    return s;
}

BitVec BitVec::slice(size_t from, size_t count) const {
    if (from + count > nbits_) throw Error("BitVec::slice: out of range");
    BitVec out(count);
    const size_t shift = from & 63;
    const size_t w0 = from >> 6;
    for (size_t w = 0; w < out.words_.size(); ++w) {
        uint64_t v = words_[w0 + w] >> shift;
        if (shift && w0 + w + 1 < words_.size()) v |= words_[w0 + w + 1] << (64 - shift);
        out.words_[w] = v;
    }
    out.mask_tail();
    return out;
}

void BitVec::splice(size_t at, const BitVec& src) {
    if (at + src.nbits_ > nbits_) throw Error("BitVec::splice: out of range");
    auto write_bits = [&](size_t pos, uint64_t v, unsigned len) {
        const size_t i = pos >> 6;
        const unsigned sh = pos & 63;
        const uint64_t mask = len == 64 ? ~uint64_t(0) : (uint64_t(1) << len) - 1;
        v &= mask;
        words_[i] = (words_[i] & ~(mask << sh)) | (v << sh);
        if (sh && sh + len > 64) {
            const unsigned hi_len = sh + len - 64;
            const uint64_t hi_mask = (uint64_t(1) << hi_len) - 1;
            words_[i + 1] = (words_[i + 1] & ~hi_mask) | (v >> (64 - sh));
        }
    };
    const size_t full = src.nbits_ / 64;
    for (size_t w = 0; w < full; ++w) write_bits(at + 64 * w, src.words_[w], 64);
    const unsigned rem = src.nbits_ & 63;
    if (rem) write_bits(at + 64 * full, src.words_[full], rem);
}

bool BitVec::operator==(const BitVec& o) const {
    if (nbits_ != o.nbits_) return false;
    return std::memcmp(words_.data(), o.words_.data(), words_.size() * 8) == 0;
}

void BitVec::mask_tail() {
    if (nbits_ & 63) words_.back() &= (uint64_t(1) << (nbits_ & 63)) - 1;
}

BitVec samples_to_bits(std::span<const int16_t> p, std::span<const int16_t> q, int bits) {
    if (p.size() != q.size()) throw Error("samples_to_bits: p/q length mismatch");
    if (bits < 2 || bits > 16) throw Error("samples_to_bits: bits out of range");
    const int32_t lo = -(1 << (bits - 1)), hi = (1 << (bits - 1)) - 1;
    const uint32_t offset = 1u << (bits - 1);

    BitVec out(p.size() * 2 * static_cast<size_t>(bits));
    size_t pos = 0;
    auto put = [&](int16_t code) {
        if (code < lo || code > hi) throw Error("samples_to_bits: code out of N-bit range");
        const uint32_t u = static_cast<uint32_t>(code + static_cast<int32_t>(offset));
        for (int b = bits - 1; b >= 0; --b) out.set(pos++, (u >> b) & 1u);
    };
    for (size_t i = 0; i < p.size(); ++i) {
        put(p[i]);
        put(q[i]);
    }
    return out;
}

void bits_to_samples(const BitVec& bv, int bits,
                     std::vector<int16_t>& p, std::vector<int16_t>& q) {
    const size_t per_pair = 2 * static_cast<size_t>(bits);
    if (bv.size() % per_pair != 0) throw Error("bits_to_samples: stream not a whole number of pairs");
    const size_t n = bv.size() / per_pair;
    const int32_t offset = 1 << (bits - 1);
    p.resize(n);
    q.resize(n);
    size_t pos = 0;
    auto take = [&]() {
        uint32_t u = 0;
        for (int b = 0; b < bits; ++b) u = (u << 1) | (bv.get(pos++) ? 1u : 0u);
        return static_cast<int16_t>(static_cast<int32_t>(u) - offset);
    };
    for (size_t i = 0; i < n; ++i) {
        p[i] = take();
        q[i] = take();
    }
}

} // namespace qrng
