#pragma once
// ADC-unit statistics -> vacuum units -> conditional min-entropy budget.

#include "qrng/adc.hpp"

#include <span>
#include <vector>

namespace qrng {
namespace cal {

/// One laser power setting: variance of the filtered quadrature signals
/// (ADC-code^2) against the DC photocurrent read at PD3.
struct CalibrationPoint {
    double photocurrent = 0.0; // amperes
    double var_p = 0.0;        // code^2
    double var_q = 0.0;
};

struct CalibrationFit {
    double slope_p = 0.0;      // code^2 / A  (m_p)
    double slope_q = 0.0;
    double intercept_p = 0.0;  // code^2, classical/electronic floor
    double intercept_q = 0.0;
    double residual_rms = 0.0; // combined over both quadratures
};

/// Ordinary least squares per quadrature, free intercept.
/// pre: >= 3 points unless exactly 2 with distinct currents; >= 2 distinct currents.
CalibrationFit fit_variance_curve(const std::vector<CalibrationPoint>& points);

/// k_{p,q} = sqrt(2 m_{p,q} I), ADC codes per vacuum unit.
struct CorrectionFactors {
    double k_p = 0.0;
    double k_q = 0.0;
};
CorrectionFactors correction_factor(const CalibrationFit& fit, double photocurrent);

/// Divide codes by k; a pure vacuum signal maps to variance 0.5.
std::vector<double> to_vacuum_units(std::span<const double> codes, double k);
std::vector<double> to_vacuum_units(std::span<const int16_t> codes, double k);

/// One LSB in vacuum units: delta = (R_adc/2^N)/k with R_adc and k in the same
/// units. Traces carry raw integer codes, so one LSB is one code and the span
/// in code units is 2^N.
double resolution(const AdcSpec& adc, double k);
/// General form for rescaled data: delta = lsb_in_data_units / k.
double resolution_lsb(double lsb_in_data_units, double k);

/// log2(pi/(delta_p*delta_q)). Exactly zero entropy (delta_p*delta_q == pi)
/// returns 0; a negative bound throws NoCertifiableRandomness.
double min_entropy(double delta_p, double delta_q);

/// h_min * pair_rate.
double generation_rate(double h_min, double pair_rate);

/// Full per-pair budget. h_min is clamped to [0, 2N] (cannot certify more
/// bits than were sampled); `clamped` records that this fired.
struct EntropyBudget {
    double k_p = 0.0, k_q = 0.0;       // codes per vacuum unit
    double delta_p = 0.0, delta_q = 0.0;
    double h_min = 0.0;                // bits per (p,q) pair
    int raw_bits = 0;                  // 2N
    double pair_rate = 0.0;            // pairs/s after decimation
    double gen_rate = 0.0;             // bits/s
    bool clamped = false;
};
EntropyBudget build_budget(const CalibrationFit& fit, double photocurrent,
                           const AdcSpec& adc, double pair_rate);

} // namespace cal
} // namespace qrng
