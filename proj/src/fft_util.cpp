#include "qrng/fft_util.hpp"
#include "qrng/errors.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <mutex>

namespace qrng {
namespace {

std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

struct FftBuffers {
    size_t n = 0;
    double* real = nullptr;
    fftw_complex* cplx = nullptr;
    fftw_plan fwd = nullptr;
    fftw_plan inv = nullptr;

    explicit FftBuffers(size_t n_) : n(n_) {
        real = fftw_alloc_real(n);
        cplx = fftw_alloc_complex(n / 2 + 1);
        std::lock_guard<std::mutex> lk(plan_mutex());
        fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), real, cplx, FFTW_ESTIMATE);
        inv = fftw_plan_dft_c2r_1d(static_cast<int>(n), cplx, real, FFTW_ESTIMATE);
    }
    ~FftBuffers() {
        std::lock_guard<std::mutex> lk(plan_mutex());
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(inv);
        fftw_free(real);
        fftw_free(cplx);
    }
    FftBuffers(const FftBuffers&) = delete;
    FftBuffers& operator=(const FftBuffers&) = delete;
};

} // namespace

std::vector<std::complex<double>> rfft(std::span<const double> x) {
    if (x.empty()) throw Error("rfft: empty input");
    FftBuffers fb(x.size());
    std::copy(x.begin(), x.end(), fb.real);
    fftw_execute(fb.fwd);
    std::vector<std::complex<double>> out(x.size() / 2 + 1);
    std::memcpy(reinterpret_cast<double*>(out.data()), fb.cplx,
                out.size() * sizeof(fftw_complex));
    return out;
}

std::vector<double> fft_convolve_valid(std::span<const double> x,
                                       std::span<const double> h) {
    const size_t nh = h.size();
    if (x.size() <= nh) throw Error("convolve: input not longer than kernel");
    const size_t n_out = x.size() - nh + 1;

    // Segment length: power of two, at least 8x kernel.
    size_t L = 1;
    while (L < nh * 8) L <<= 1;
    const size_t step = L - (nh - 1);

    FftBuffers fb(L);
    std::vector<std::complex<double>> H(L / 2 + 1);
    std::fill(fb.real, fb.real + L, 0.0);
    std::copy(h.begin(), h.end(), fb.real);
    fftw_execute(fb.fwd);
    std::memcpy(reinterpret_cast<double*>(H.data()), fb.cplx,
                H.size() * sizeof(fftw_complex));

    std::vector<double> out(n_out);
    const double scale = 1.0 / static_cast<double>(L);
    // Overlap-save: segment s covers output [s*step, s*step + step).
    for (size_t pos = 0; pos < n_out; pos += step) {
        const size_t avail = std::min(L, x.size() - pos);
        std::copy(x.begin() + pos, x.begin() + pos + avail, fb.real);
        std::fill(fb.real + avail, fb.real + L, 0.0);
        fftw_execute(fb.fwd);
        for (size_t k = 0; k < H.size(); ++k) {
            const std::complex<double> v =
                std::complex<double>(fb.cplx[k][0], fb.cplx[k][1]) * H[k];
            fb.cplx[k][0] = v.real();
            fb.cplx[k][1] = v.imag();
        }
        fftw_execute(fb.inv);
        const size_t take = std::min(step, n_out - pos);
        for (size_t i = 0; i < take; ++i) out[pos + i] = fb.real[nh - 1 + i] * scale;
    }
    return out;
}

} // namespace qrng
