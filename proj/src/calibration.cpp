#include "qrng/calibration.hpp"
#include "qrng/errors.hpp"

#include <algorithm>
#include <cmath>

namespace qrng {
namespace cal {
namespace {

struct Line {
    double slope, intercept, rss;
};

Line ols(const std::vector<CalibrationPoint>& pts, double CalibrationPoint::*y) {
    const double n = static_cast<double>(pts.size());
    double sx = 0, sy = 0;
    for (const auto& p : pts) {
        sx += p.photocurrent;
        sy += p.*y;
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (const auto& p : pts) {
        sxx += (p.photocurrent - mx) * (p.photocurrent - mx);
        sxy += (p.photocurrent - mx) * (p.*y - my);
    }
    if (sxx <= 0.0) throw Error("fit_variance_curve: all currents equal (degenerate design)");
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double rss = 0;
    for (const auto& p : pts) {
        const double r = p.*y - (slope * p.photocurrent + intercept);
        rss += r * r;
    }
    return {slope, intercept, rss};
}

} // namespace

CalibrationFit fit_variance_curve(const std::vector<CalibrationPoint>& points) {
    if (points.size() < 2) throw Error("fit_variance_curve: need at least 2 points");
    for (const auto& p : points)
        if (p.var_p < 0 || p.var_q < 0 || !std::isfinite(p.var_p) || !std::isfinite(p.var_q))
            throw Error("fit_variance_curve: variances must be finite and >= 0");

    const Line lp = ols(points, &CalibrationPoint::var_p);
    const Line lq = ols(points, &CalibrationPoint::var_q);
    CalibrationFit f;
    f.slope_p = lp.slope;
    f.slope_q = lq.slope;
    f.intercept_p = lp.intercept;
    f.intercept_q = lq.intercept;
    f.residual_rms = std::sqrt((lp.rss + lq.rss) / (2.0 * static_cast<double>(points.size())));
    return f;
}

CorrectionFactors correction_factor(const CalibrationFit& fit, double photocurrent) {
    if (!(photocurrent > 0)) throw Error("correction_factor: photocurrent must be > 0");
    if (!(fit.slope_p > 0) || !(fit.slope_q > 0))
        throw Error("correction_factor: non-positive calibration slope");
    return {std::sqrt(2.0 * fit.slope_p * photocurrent),
            std::sqrt(2.0 * fit.slope_q * photocurrent)};
}

std::vector<double> to_vacuum_units(std::span<const double> codes, double k) {
    if (!(k > 0)) throw Error("to_vacuum_units: k must be > 0");
    std::vector<double> out(codes.size());
    const double inv = 1.0 / k;
    for (size_t i = 0; i < codes.size(); ++i) out[i] = codes[i] * inv;
    return out;
}

std::vector<double> to_vacuum_units(std::span<const int16_t> codes, double k) {
    std::vector<double> d(codes.begin(), codes.end());
    return to_vacuum_units(std::span<const double>(d), k);
}

double resolution_lsb(double lsb_in_data_units, double k) {
    if (!(k > 0)) throw Error("resolution: k must be > 0");
    return lsb_in_data_units / k;
}

double resolution(const AdcSpec& adc, double k) {
    const double span_codes = static_cast<double>(1 << adc.bits);
    return resolution_lsb(span_codes / static_cast<double>(1 << adc.bits), k);
}

double min_entropy(double delta_p, double delta_q) {
    if (!(delta_p > 0) || !(delta_q > 0)) throw Error("min_entropy: resolutions must be > 0");
    const double prod = delta_p * delta_q;
    if (prod > M_PI) throw NoCertifiableRandomness();
    return std::log2(M_PI / prod);
}

double generation_rate(double h_min, double pair_rate) {
    if (!(h_min > 0) || !(pair_rate > 0)) throw Error("generation_rate: inputs must be positive");
    return h_min * pair_rate;
}

EntropyBudget build_budget(const CalibrationFit& fit, double photocurrent,
                           const AdcSpec& adc, double pair_rate) {
    const auto k = correction_factor(fit, photocurrent);
    EntropyBudget b;
    b.k_p = k.k_p;
    b.k_q = k.k_q;
    b.delta_p = resolution(adc, k.k_p);
    b.delta_q = resolution(adc, k.k_q);
    b.raw_bits = 2 * adc.bits;
    b.h_min = min_entropy(b.delta_p, b.delta_q);
    if (b.h_min > static_cast<double>(b.raw_bits)) {
        b.h_min = static_cast<double>(b.raw_bits);
        b.clamped = true;
    }
    b.pair_rate = pair_rate;
    b.gen_rate = b.h_min > 0 ? generation_rate(b.h_min, pair_rate) : 0.0;
    return b;
}

} // namespace cal
} // namespace qrng
