#pragma once
// Trace files: 64-byte header + interleaved little-endian int16 (p,q) codes.
//
// header layout (little endian):
//   0  char[8]  magic "QRNGTRC1"
//   8  u32      adc bits (N)
//  12  u32      reserved (0)
//  16  f64      sample_rate [Hz]
//  24  f64      full_scale [V]
//  32  f64      photocurrent [A]
//  40  u64      length in (p,q) pairs
//  48  u64      seed
//  56  u64      reserved (0)

#include "qrng/adc.hpp"
#include "qrng/bitvec.hpp"

#include <filesystem>
#include <vector>

namespace qrng {
namespace io {

void write_trace(const std::filesystem::path& path, const RawTrace& trace);
RawTrace read_trace(const std::filesystem::path& path);

/// Sidecar descriptor for headerless dumps of 12-bit-in-16 style captures.
struct HeaderlessDescriptor {
    int bits = 12;
    double sample_rate = 20e9;
    double full_scale = 0.8;
    double photocurrent = 0.0;
};
HeaderlessDescriptor read_descriptor(const std::filesystem::path& json_path);

/// Headerless interleaved int16 dump: length = filesize/4 pairs.
RawTrace ingest_headerless(const std::filesystem::path& path,
                           const HeaderlessDescriptor& desc);

/// Raw doubles / packed bits / text helpers used by the pipeline stages.
void write_f64(const std::filesystem::path& path, const std::vector<double>& v);
std::vector<double> read_f64(const std::filesystem::path& path);
void write_bits(const std::filesystem::path& path, const BitVec& bits);
BitVec read_bits(const std::filesystem::path& path);
/// Seed files carry exactly ceil(nbits/8) bytes; trailing pad bits must be 0.
BitVec read_seed_file(const std::filesystem::path& path, size_t nbits);
void write_text(const std::filesystem::path& path, const std::string& text);

} // namespace io
} // namespace qrng
