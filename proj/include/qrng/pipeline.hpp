#pragma once
// Batch pipeline: simulate/ingest -> filter -> calibrate -> downsample ->
// pack -> extract -> test, with every stage boundary a file in the run
// directory and a manifest that pins the configuration.

#include "qrng/calibration.hpp"
#include "qrng/dsp.hpp"
#include "qrng/source_sim.hpp"
#include "qrng/stattests.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace qrng {

struct PipelineConfig {
    SourceParams source;
    AdcSpec adc;

    double band_low = 0.2e9;    // Hz
    double band_high = 2.2e9;
    int filter_taps = 511;

    enum class Downsample { Auto, Fixed };
    Downsample downsample_policy = Downsample::Auto;
    size_t downsample_factor = 10; // used when Fixed

    std::vector<double> calibration_currents; // amperes
    size_t calibration_samples = 1000000;

    size_t production_samples = 10000000;
    uint64_t simulation_seed = 1;

    size_t extractor_n = 15000;
    size_t extractor_m = 10788;   // 0 = choose largest feasible
    double target_eps_exp = 63.0;
    uint64_t extractor_seed = 2;
    std::string seed_file;        // when set, overrides extractor_seed
    bool insecure_allow = false;

    size_t test_stream_bits = 1000000;
    size_t test_streams = 0;      // 0 = as many as the extracted data allows
    double alpha = 0.01;
    int acf_max_lag = 100;

    double projection_gain_db = 0.0; // optional optical-power scenario
    unsigned threads = 0;
    std::string output_dir = "qrng_run";

    void validate() const;
    std::string canonical_json() const;

    static PipelineConfig from_json_file(const std::filesystem::path& p);
    static PipelineConfig paper_preset();
    void to_json_file(const std::filesystem::path& p) const;
};

struct RunReport {
    cal::CalibrationFit fit;
    cal::EntropyBudget budget;
    double variance_vu_p = 0.0, variance_vu_q = 0.0;
    int first_zero = 0;          // 0 when policy is Fixed
    size_t downsample_factor = 0;

    size_t extractor_n = 0, extractor_m = 0;
    double eps_exp = 0.0;
    double m_over_n = 0.0, budget_ratio = 0.0; // budget_ratio = h_min/raw_bits
    bool ratio_ok = false;
    size_t extracted_bits = 0;

    sts::TestReport tests;
    double acf_after_frac_in_bound = 0.0;  // lags 1..max_lag
    double acf_before_max_abs = 0.0;       // lags 1..max_lag

    std::optional<double> projected_h_min; // projection_gain_db scenario
    std::optional<double> projected_gen_rate;

    uint64_t config_hash = 0;
    std::string to_json() const;

    bool overall_pass() const { return tests.all_passed && ratio_ok; }
};

/// Executes all stages, writes artifacts under config.output_dir, returns the
/// report (also written as report.json). Throws qrng::Error tagged with the
/// failing stage.
RunReport run_pipeline(const PipelineConfig& config);

/// FNV-1a 64 over the canonical config serialization.
uint64_t fnv1a64(const std::string& s);

/// Calibration from already-captured traces: filter, variance, fit.
struct CalibrationOutcome {
    std::vector<cal::CalibrationPoint> points;
    cal::CalibrationFit fit;
};
CalibrationOutcome calibrate_traces(const std::vector<RawTrace>& traces,
                                    const dsp::FilterKernel& kernel);

} // namespace qrng
