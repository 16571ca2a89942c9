#include "qrng/trace_io.hpp"
#include "qrng/errors.hpp"

#include <json.hpp>

#include <cstring>
#include <fstream>

namespace qrng {
namespace io {
namespace {

constexpr char kMagic[8] = {'Q', 'R', 'N', 'G', 'T', 'R', 'C', '1'};
constexpr size_t kHeaderSize = 64;

std::ifstream open_in(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw Error("cannot open for reading: " + p.string());
    return f;
}

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open for writing: " + p.string());
    return f;
}

void range_check(const std::vector<int16_t>& codes, int bits) {
    const int32_t lim = 1 << (bits - 1);
    for (int16_t c : codes)
        if (c > lim - 1 || c < -lim)
            throw Error("trace codes out of range for declared bit depth");
}

} // namespace

void write_trace(const std::filesystem::path& path, const RawTrace& trace) {
    if (trace.p_codes.size() != trace.q_codes.size())
        throw Error("write_trace: p/q length mismatch");
    auto f = open_out(path);

    uint8_t hdr[kHeaderSize] = {0};
    std::memcpy(hdr, kMagic, 8);
    const uint32_t bits = static_cast<uint32_t>(trace.adc.bits);
    std::memcpy(hdr + 8, &bits, 4);
    std::memcpy(hdr + 16, &trace.adc.sample_rate, 8);
    std::memcpy(hdr + 24, &trace.adc.full_scale, 8);
    std::memcpy(hdr + 32, &trace.photocurrent, 8);
    const uint64_t len = trace.p_codes.size();
    std::memcpy(hdr + 40, &len, 8);
    std::memcpy(hdr + 48, &trace.seed, 8);
    f.write(reinterpret_cast<const char*>(hdr), kHeaderSize);

    std::vector<int16_t> inter(2 * trace.p_codes.size());
    for (size_t i = 0; i < trace.p_codes.size(); ++i) {
        inter[2 * i] = trace.p_codes[i];
        inter[2 * i + 1] = trace.q_codes[i];
    }
    f.write(reinterpret_cast<const char*>(inter.data()),
            static_cast<std::streamsize>(inter.size() * 2));
    if (!f) throw Error("write_trace: write failed");
}

RawTrace read_trace(const std::filesystem::path& path) {
    auto f = open_in(path);
    uint8_t hdr[kHeaderSize];
    f.read(reinterpret_cast<char*>(hdr), kHeaderSize);
    if (f.gcount() != kHeaderSize) throw Error("read_trace: truncated header");
    if (std::memcmp(hdr, kMagic, 8) != 0) throw Error("read_trace: bad magic");

    RawTrace tr;
    uint32_t bits;
    std::memcpy(&bits, hdr + 8, 4);
    if (bits < 2 || bits > 16) throw Error("read_trace: invalid bit depth");
    tr.adc.bits = static_cast<int>(bits);
    std::memcpy(&tr.adc.sample_rate, hdr + 16, 8);
    std::memcpy(&tr.adc.full_scale, hdr + 24, 8);
    std::memcpy(&tr.photocurrent, hdr + 32, 8);
    uint64_t len;
    std::memcpy(&len, hdr + 40, 8);
    std::memcpy(&tr.seed, hdr + 48, 8);
    tr.adc.validate();

    std::vector<int16_t> inter(2 * len);
    f.read(reinterpret_cast<char*>(inter.data()),
           static_cast<std::streamsize>(inter.size() * 2));
    if (static_cast<uint64_t>(f.gcount()) != inter.size() * 2)
        throw Error("read_trace: truncated payload");

    tr.p_codes.resize(len);
    tr.q_codes.resize(len);
    for (uint64_t i = 0; i < len; ++i) {
        tr.p_codes[i] = inter[2 * i];
        tr.q_codes[i] = inter[2 * i + 1];
    }
    range_check(tr.p_codes, tr.adc.bits);
    range_check(tr.q_codes, tr.adc.bits);
    return tr;
}

HeaderlessDescriptor read_descriptor(const std::filesystem::path& json_path) {
    auto f = open_in(json_path);
    nlohmann::json j;
    f >> j;
    HeaderlessDescriptor d;
    d.bits = j.at("bits").get<int>();
    d.sample_rate = j.at("sample_rate_hz").get<double>();
    d.full_scale = j.at("full_scale_v").get<double>();
    d.photocurrent = j.value("photocurrent_a", 0.0);
    return d;
}

RawTrace ingest_headerless(const std::filesystem::path& path,
                           const HeaderlessDescriptor& desc) {
    const auto size = std::filesystem::file_size(path);
    if (size % 4 != 0) throw Error("ingest_headerless: file size not a multiple of 4");
    const uint64_t n = size / 4;
    auto f = open_in(path);
    std::vector<int16_t> inter(2 * n);
    f.read(reinterpret_cast<char*>(inter.data()), static_cast<std::streamsize>(size));
    if (static_cast<uint64_t>(f.gcount()) != size) throw Error("ingest_headerless: short read");

    RawTrace tr;
    tr.adc = AdcSpec{desc.bits, desc.full_scale, desc.sample_rate};
    tr.adc.validate();
    tr.photocurrent = desc.photocurrent;
    tr.p_codes.resize(n);
    tr.q_codes.resize(n);
    for (uint64_t i = 0; i < n; ++i) {
        tr.p_codes[i] = inter[2 * i];
        tr.q_codes[i] = inter[2 * i + 1];
    }
    range_check(tr.p_codes, tr.adc.bits);
    range_check(tr.q_codes, tr.adc.bits);
    return tr;
}

void write_f64(const std::filesystem::path& path, const std::vector<double>& v) {
    auto f = open_out(path);
    f.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (!f) throw Error("write_f64: write failed");
}

std::vector<double> read_f64(const std::filesystem::path& path) {
    const auto size = std::filesystem::file_size(path);
    if (size % sizeof(double) != 0) throw Error("read_f64: bad file size");
    std::vector<double> v(size / sizeof(double));
    auto f = open_in(path);
    f.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(size));
    if (static_cast<uint64_t>(f.gcount()) != size) throw Error("read_f64: short read");
    return v;
}

void write_bits(const std::filesystem::path& path, const BitVec& bits) {
    const auto bytes = bits.to_bytes();
    auto f = open_out(path);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
    if (!f) throw Error("write_bits: write failed");
}

BitVec read_bits(const std::filesystem::path& path) {
    const auto size = std::filesystem::file_size(path);
    std::vector<uint8_t> bytes(size);
    auto f = open_in(path);
    f.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
    if (static_cast<uint64_t>(f.gcount()) != size) throw Error("read_bits: short read");
    return BitVec::from_bytes(bytes, size * 8);
}

BitVec read_seed_file(const std::filesystem::path& path, size_t nbits) {
    const auto size = std::filesystem::file_size(path);
    if (size != (nbits + 7) / 8)
        throw Error("seed file has wrong length for requested bit count");
    std::vector<uint8_t> bytes(size);
    auto f = open_in(path);
    f.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
    if (static_cast<uint64_t>(f.gcount()) != size) throw Error("seed file: short read");
    if (nbits & 7) {
        const uint8_t pad = static_cast<uint8_t>(bytes.back() >> (nbits & 7));
        if (pad != 0) throw Error("seed file: nonzero padding bits");
    }
    return BitVec::from_bytes(bytes, nbits);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    auto f = open_out(path);
    f << text;
    if (!f) throw Error("write_text: write failed");
}

} // namespace io
} // namespace qrng
