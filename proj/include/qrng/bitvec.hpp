#pragma once
// Packed bit sequence. Bit i lives in word i/64 at position i%64, which makes
// the byte serialization little-endian bit order within bytes.

#include <cstdint>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace qrng {

class BitVec {
public:
    BitVec() = default;
    explicit BitVec(size_t nbits) : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

    /// From a string of '0'/'1', index 0 first.
    static BitVec from_string(const std::string& s);
    static BitVec from_bytes(std::span<const uint8_t> bytes, size_t nbits);

    size_t size() const { return nbits_; }
    bool empty() const { return nbits_ == 0; }

    bool get(size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
    void set(size_t i, bool v) {
        const uint64_t m = uint64_t(1) << (i & 63);
        if (v) words_[i >> 6] |= m;
        else words_[i >> 6] &= ~m;
    }
    void push_back(bool v) {
        if ((nbits_ & 63) == 0) words_.push_back(0);
        if (v) words_[nbits_ >> 6] |= uint64_t(1) << (nbits_ & 63);
        ++nbits_;
    }

    const uint64_t* words() const { return words_.data(); }
    uint64_t* words() { return words_.data(); }
    size_t word_count() const { return words_.size(); }

    std::vector<uint8_t> to_bytes() const;
    std::string to_string() const;

    /// Copy `count` bits starting at `from` into a fresh BitVec.
    BitVec slice(size_t from, size_t count) const;
    /// Overwrite bits [at, at+src.size()) with src.
    void splice(size_t at, const BitVec& src);

    bool operator==(const BitVec& o) const;

    /// Clears any stale bits above size() in the last word.
    void mask_tail();

private:
    size_t nbits_ = 0;
    std::vector<uint64_t> words_;
};

/// Offset-binary packing of downsampled code pairs: per pair 2N bits,
/// (code + 2^(N-1)) MSB first, p before q. Throws on out-of-range codes.
BitVec samples_to_bits(std::span<const int16_t> p, std::span<const int16_t> q, int bits);

/// Inverse of samples_to_bits (used by tests and diagnostics).
void bits_to_samples(const BitVec& bv, int bits,
                     std::vector<int16_t>& p, std::vector<int16_t>& q);

} // namespace qrng
