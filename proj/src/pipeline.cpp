#include "qrng/pipeline.hpp"
#include "qrng/errors.hpp"
#include "qrng/prng.hpp"
#include "qrng/toeplitz.hpp"
#include "qrng/trace_io.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace qrng {

using nlohmann::json;

namespace {

double variance(std::span<const double> x) {
    const double n = static_cast<double>(x.size());
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double s = 0.0;
    for (double v : x) s += (v - mean) * (v - mean);
    return s / n;
}

// Quantities carry their unit in the key name and are stored in SI units so
// that save/load round trips are bit-exact.
json source_to_json(const SourceParams& s) {
    return json{{"photocurrent_a", s.photocurrent},
                {"quantum_slope_v2_per_a", s.quantum_slope},
                {"classical_noise_var_v2", s.classical_noise_var},
                {"electronic_noise_var_v2", s.electronic_noise_var},
                {"lowfreq_amplitude_v", s.lowfreq.amplitude},
                {"lowfreq_cutoff_hz", s.lowfreq.cutoff},
                {"tia_bandwidth_hz", s.tia_bandwidth}};
}

SourceParams source_from_json(const json& j) {
    SourceParams s;
    s.photocurrent = j.at("photocurrent_a").get<double>();
    s.quantum_slope = j.at("quantum_slope_v2_per_a").get<double>();
    s.classical_noise_var = j.at("classical_noise_var_v2").get<double>();
    s.electronic_noise_var = j.at("electronic_noise_var_v2").get<double>();
    s.lowfreq.amplitude = j.at("lowfreq_amplitude_v").get<double>();
    s.lowfreq.cutoff = j.at("lowfreq_cutoff_hz").get<double>();
    s.tia_bandwidth = j.at("tia_bandwidth_hz").get<double>();
    return s;
}

json config_to_json(const PipelineConfig& c) {
    json j;
    j["source"] = source_to_json(c.source);
    j["adc"] = {{"bits", c.adc.bits},
                {"full_scale_v", c.adc.full_scale},
                {"sample_rate_hz", c.adc.sample_rate}};
    j["filter"] = {{"low_hz", c.band_low},
                   {"high_hz", c.band_high},
                   {"taps", c.filter_taps}};
    j["downsample"] = {{"policy", c.downsample_policy == PipelineConfig::Downsample::Auto
                                      ? "auto" : "fixed"},
                       {"factor", c.downsample_factor}};
    json cur = json::array();
    for (double i : c.calibration_currents) cur.push_back(i);
    j["calibration"] = {{"currents_a", cur}, {"samples_per_point", c.calibration_samples}};
    j["production"] = {{"n_samples", c.production_samples}, {"seed", c.simulation_seed}};
    j["extractor"] = {{"n", c.extractor_n},
                      {"m", c.extractor_m},
                      {"target_eps_exp", c.target_eps_exp},
                      {"seed", c.extractor_seed},
                      {"seed_file", c.seed_file},
                      {"insecure_allow", c.insecure_allow}};
    j["tests"] = {{"stream_bits", c.test_stream_bits},
                  {"n_streams", c.test_streams},
                  {"alpha", c.alpha},
                  {"acf_max_lag", c.acf_max_lag}};
    j["projection_gain_db"] = c.projection_gain_db;
    j["threads"] = c.threads;
    j["output_dir"] = c.output_dir;
    return j;
}

PipelineConfig config_from_json(const json& j) {
    PipelineConfig c;
    c.source = source_from_json(j.at("source"));
    c.adc.bits = j.at("adc").at("bits").get<int>();
    c.adc.full_scale = j.at("adc").at("full_scale_v").get<double>();
    c.adc.sample_rate = j.at("adc").at("sample_rate_hz").get<double>();
    c.band_low = j.at("filter").at("low_hz").get<double>();
    c.band_high = j.at("filter").at("high_hz").get<double>();
    c.filter_taps = j.at("filter").at("taps").get<int>();
    const std::string pol = j.at("downsample").at("policy").get<std::string>();
    if (pol == "auto") c.downsample_policy = PipelineConfig::Downsample::Auto;
    else if (pol == "fixed") c.downsample_policy = PipelineConfig::Downsample::Fixed;
    else throw Error("config: downsample policy must be 'auto' or 'fixed'");
    c.downsample_factor = j.at("downsample").at("factor").get<size_t>();
    c.calibration_currents.clear();
    for (const auto& v : j.at("calibration").at("currents_a"))
        c.calibration_currents.push_back(v.get<double>());
    c.calibration_samples = j.at("calibration").at("samples_per_point").get<size_t>();
    c.production_samples = j.at("production").at("n_samples").get<size_t>();
    c.simulation_seed = j.at("production").at("seed").get<uint64_t>();
    c.extractor_n = j.at("extractor").at("n").get<size_t>();
    c.extractor_m = j.at("extractor").at("m").get<size_t>();
    c.target_eps_exp = j.at("extractor").at("target_eps_exp").get<double>();
    c.extractor_seed = j.at("extractor").at("seed").get<uint64_t>();
    c.seed_file = j.at("extractor").value("seed_file", std::string{});
    c.insecure_allow = j.at("extractor").value("insecure_allow", false);
    c.test_stream_bits = j.at("tests").at("stream_bits").get<size_t>();
    c.test_streams = j.at("tests").at("n_streams").get<size_t>();
    c.alpha = j.at("tests").at("alpha").get<double>();
    c.acf_max_lag = j.at("tests").at("acf_max_lag").get<int>();
    c.projection_gain_db = j.value("projection_gain_db", 0.0);
    c.threads = j.value("threads", 0u);
    c.output_dir = j.value("output_dir", std::string("qrng_run"));
    return c;
}

[[noreturn]] void stage_fail(const std::string& stage, const std::string& what) {
    throw Error("[stage:" + stage + "] " + what);
}

} // namespace

uint64_t fnv1a64(const std::string& s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void PipelineConfig::validate() const {
    source.validate();
    adc.validate();
    if (!(band_low > 0) || !(band_low < band_high) || !(band_high < adc.sample_rate / 2))
        throw Error("config: invalid filter band");
    if (calibration_currents.size() < 2) throw Error("config: need >= 2 calibration currents");
    if (calibration_samples < static_cast<size_t>(filter_taps) * 2)
        throw Error("config: calibration_samples too small for the filter");
    if (production_samples < static_cast<size_t>(filter_taps) * 2)
        throw Error("config: production_samples too small for the filter");
    if (extractor_n == 0 || extractor_n % static_cast<size_t>(2 * adc.bits) != 0)
        throw Error("config: extractor n must be a multiple of 2N");
    if (downsample_policy == Downsample::Fixed && downsample_factor < 1)
        throw Error("config: fixed downsample factor must be >= 1");
}

std::string PipelineConfig::canonical_json() const {
    return config_to_json(*this).dump(2);
}

PipelineConfig PipelineConfig::from_json_file(const std::filesystem::path& p) {
    std::ifstream f(p);
    if (!f) throw Error("cannot open config: " + p.string());
    json j;
    f >> j;
    return config_from_json(j);
}

void PipelineConfig::to_json_file(const std::filesystem::path& p) const {
    io::write_text(p, canonical_json() + "\n");
}

PipelineConfig PipelineConfig::paper_preset() {
    PipelineConfig c;
    const PaperConfig pc = paper_config();
    c.source = pc.source;
    c.adc = pc.adc;
    c.band_low = pc.band_low;
    c.band_high = pc.band_high;
    c.filter_taps = pc.filter_taps;
    c.downsample_policy = Downsample::Auto;
    c.downsample_factor = 10;
    c.calibration_currents.resize(24);
    for (size_t i = 0; i < 24; ++i)
        c.calibration_currents[i] = 70e-6 * static_cast<double>(i) / 23.0;
    c.calibration_samples = 1000000;
    // desk-scale battery default: 100 streams of 10^6 bits
    c.production_samples = 60000000;
    c.simulation_seed = 20250809;
    c.extractor_n = 15000;
    c.extractor_m = 10788;
    c.target_eps_exp = 63.0;
    c.extractor_seed = 0x0DDB1A5E5BA5E5EEULL;
    c.test_stream_bits = 1000000;
    c.test_streams = 100;
    c.alpha = 0.01;
    c.acf_max_lag = 100;
    c.output_dir = "qrng_run";
    return c;
}

CalibrationOutcome calibrate_traces(const std::vector<RawTrace>& traces,
                                    const dsp::FilterKernel& kernel) {
    CalibrationOutcome out;
    for (const auto& tr : traces) {
        const auto fp = dsp::apply_filter(std::span<const int16_t>(tr.p_codes), kernel);
        const auto fq = dsp::apply_filter(std::span<const int16_t>(tr.q_codes), kernel);
        out.points.push_back({tr.photocurrent, variance(fp), variance(fq)});
    }
    out.fit = cal::fit_variance_curve(out.points);
    return out;
}

std::string RunReport::to_json() const {
    json j;
    j["calibration"] = {{"slope_p", fit.slope_p},
                        {"slope_q", fit.slope_q},
                        {"intercept_p", fit.intercept_p},
                        {"intercept_q", fit.intercept_q},
                        {"residual_rms", fit.residual_rms}};
    j["budget"] = {{"k_p", budget.k_p},
                   {"k_q", budget.k_q},
                   {"delta_p", budget.delta_p},
                   {"delta_q", budget.delta_q},
                   {"h_min_bits", budget.h_min},
                   {"raw_bits", budget.raw_bits},
                   {"pair_rate", budget.pair_rate},
                   {"gen_rate_bps", budget.gen_rate},
                   {"clamped", budget.clamped}};
    j["variance_vu"] = {{"p", variance_vu_p}, {"q", variance_vu_q}};
    j["downsample"] = {{"first_zero_lag", first_zero}, {"factor", downsample_factor}};
    j["extractor"] = {{"n", extractor_n},
                      {"m", extractor_m},
                      {"eps_exp", eps_exp},
                      {"eps_exp_formula", "(n*h_min/raw_bits - m)/2, no additive constant"},
                      {"m_over_n", m_over_n},
                      {"h_min_over_raw_bits", budget_ratio},
                      {"ratio_condition_ok", ratio_ok},
                      {"extracted_bits", extracted_bits}};
    json insts = json::array();
    for (const auto& ti : tests.instances) {
        insts.push_back({{"name", ti.name},
                         {"category", ti.category},
                         {"uniformity_P", ti.uniformity},
                         {"proportion", ti.proportion},
                         {"proportion_band", {ti.prop_lo, ti.prop_hi}},
                         {"verdict", ti.passed ? "PASSED" : "FAILED"},
                         {"p_values", ti.p_values}});
    }
    json cats = json::array();
    for (const auto& row : tests.by_category())
        cats.push_back({{"name", row.name},
                        {"P_value", row.min_uniformity},
                        {"verdict", row.passed ? "PASSED" : "FAILED"}});
    j["tests"] = {{"stream_bits", tests.stream_bits},
                  {"n_streams", tests.n_streams},
                  {"alpha", tests.alpha},
                  {"all_passed", tests.all_passed},
                  {"categories", cats},
                  {"instances", insts}};
    j["acf"] = {{"after_frac_in_bound", acf_after_frac_in_bound},
                {"before_max_abs", acf_before_max_abs}};
    if (projected_h_min) {
        j["projection"] = {{"h_min_bits", *projected_h_min},
                           {"gen_rate_bps", *projected_gen_rate}};
    }
    j["config_hash"] = config_hash;
    j["overall_pass"] = overall_pass();
    return j.dump(2);
}

RunReport run_pipeline(const PipelineConfig& config) {
    namespace fs = std::filesystem;
    try {
        config.validate();
    } catch (const std::exception& e) {
        stage_fail("config", e.what());
    }
    const fs::path dir(config.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) stage_fail("config", "cannot create output dir: " + dir.string());

    RunReport rep;
    rep.config_hash = fnv1a64(config.canonical_json());
    config.to_json_file(dir / "config.json");

    // --- simulate: calibration sweep + production trace ---
    std::vector<RawTrace> sweep;
    RawTrace production;
    try {
        sweep = sweep_calibration(config.source, config.calibration_currents, config.adc,
                                  config.calibration_samples, config.simulation_seed,
                                  config.threads);
        for (size_t i = 0; i < sweep.size(); ++i) {
            std::ostringstream name;
            name << "sweep_" << i << ".qrt";
            io::write_trace(dir / name.str(), sweep[i]);
        }
        production = simulate_trace(config.source, config.adc, config.production_samples,
                                    philox_u64(config.simulation_seed, 0xFEED, 0),
                                    config.threads);
        io::write_trace(dir / "production.qrt", production);
    } catch (const std::exception& e) {
        stage_fail("simulate", e.what());
    }

    // --- filter ---
    dsp::FilterKernel kernel;
    std::vector<double> filt_p, filt_q;
    try {
        kernel = dsp::design_bandpass(config.band_low, config.band_high,
                                      config.adc.sample_rate, config.filter_taps);
        filt_p = dsp::apply_filter(std::span<const int16_t>(production.p_codes), kernel);
        filt_q = dsp::apply_filter(std::span<const int16_t>(production.q_codes), kernel);
        io::write_f64(dir / "filtered_p.f64", filt_p);
        io::write_f64(dir / "filtered_q.f64", filt_q);
    } catch (const std::exception& e) {
        stage_fail("filter", e.what());
    }

    // --- calibrate ---
    try {
        if (!(config.source.photocurrent > 0)) throw NoCertifiableRandomness();
        auto outcome = calibrate_traces(sweep, kernel);
        rep.fit = outcome.fit;
        std::ostringstream csv;
        csv << "photocurrent_a,var_p_code2,var_q_code2\n";
        for (const auto& pt : outcome.points)
            csv << pt.photocurrent << "," << pt.var_p << "," << pt.var_q << "\n";
        io::write_text(dir / "calibration.csv", csv.str());
    } catch (const std::exception& e) {
        stage_fail("calibrate", e.what());
    }

    // --- downsample ---
    std::vector<int16_t> ds_p, ds_q;
    try {
        if (config.downsample_policy == PipelineConfig::Downsample::Auto) {
            const auto acf = dsp::autocorrelation(
                std::span<const double>(filt_p),
                std::max(config.acf_max_lag, 16));
            rep.first_zero = dsp::first_zero_lag(acf);
            rep.downsample_factor = static_cast<size_t>(rep.first_zero);
        } else {
            rep.first_zero = 0;
            rep.downsample_factor = config.downsample_factor;
        }
        // Decimate the filtered stream, then re-quantize to integer codes for
        // packing: filtered samples are linear combinations of codes, rounded
        // to the nearest code.
        const auto dp = dsp::downsample(std::span<const double>(filt_p), rep.downsample_factor);
        const auto dq = dsp::downsample(std::span<const double>(filt_q), rep.downsample_factor);
        auto to_codes = [&](const std::vector<double>& v, std::vector<int16_t>& out) {
            out.resize(v.size());
            for (size_t i = 0; i < v.size(); ++i)
                out[i] = static_cast<int16_t>(quantize(v[i] * config.adc.lsb_volts(), config.adc));
        };
        to_codes(dp, ds_p);
        to_codes(dq, ds_q);
    } catch (const std::exception& e) {
        stage_fail("downsample", e.what());
    }

    // --- budget (vacuum units, min-entropy, rate) ---
    try {
        const double pair_rate = config.adc.sample_rate / static_cast<double>(rep.downsample_factor);
        rep.budget = cal::build_budget(rep.fit, config.source.photocurrent, config.adc, pair_rate);
        const auto vu_p = cal::to_vacuum_units(std::span<const double>(filt_p), rep.budget.k_p);
        const auto vu_q = cal::to_vacuum_units(std::span<const double>(filt_q), rep.budget.k_q);
        rep.variance_vu_p = variance(vu_p);
        rep.variance_vu_q = variance(vu_q);
    } catch (const std::exception& e) {
        stage_fail("calibrate", e.what());
    }

    // --- pack ---
    BitVec packed;
    try {
        packed = samples_to_bits(ds_p, ds_q, config.adc.bits);
        io::write_bits(dir / "packed.bits", packed);
    } catch (const std::exception& e) {
        stage_fail("pack", e.what());
    }

    // --- extract ---
    BitVec extracted;
    try {
        const size_t n = config.extractor_n;
        size_t m = config.extractor_m;
        if (m == 0)
            m = ext::choose_output_bits(rep.budget.h_min, rep.budget.raw_bits, n,
                                        config.target_eps_exp);
        BitVec seed_bits = config.seed_file.empty()
                               ? ext::expand_seed_bits(config.extractor_seed, n + m - 1)
                               : io::read_seed_file(config.seed_file, n + m - 1);
        io::write_bits(dir / "seed.bits", seed_bits);
        auto spec = ext::ToeplitzSpec::make(n, m, std::move(seed_bits), rep.budget.h_min,
                                            rep.budget.raw_bits, config.insecure_allow);
        rep.extractor_n = n;
        rep.extractor_m = m;
        rep.eps_exp = spec.epsilon_exp;
        rep.m_over_n = static_cast<double>(m) / static_cast<double>(n);
        rep.budget_ratio = rep.budget.h_min / static_cast<double>(rep.budget.raw_bits);
        rep.ratio_ok = rep.m_over_n < rep.budget_ratio;
        extracted = ext::extract_stream(packed, spec, config.threads);
        rep.extracted_bits = extracted.size();
        io::write_bits(dir / "extracted.bits", extracted);
    } catch (const std::exception& e) {
        stage_fail("extract", e.what());
    }

    // --- test ---
    try {
        size_t streams = config.test_streams;
        if (streams == 0) streams = extracted.size() / config.test_stream_bits;
        if (streams < 2)
            throw Error("not enough extracted data for the test battery");
        rep.tests = sts::run_battery(extracted, config.test_stream_bits, streams, config.alpha);

        std::vector<double> before(ds_p.begin(), ds_p.end());
        const auto cmp = sts::compare_acf(before, extracted, config.acf_max_lag);
        size_t in_bound = 0;
        double max_abs = 0.0;
        for (int k = 1; k <= config.acf_max_lag; ++k) {
            if (std::abs(cmp.after.values[k]) < cmp.after.bound99) ++in_bound;
            max_abs = std::max(max_abs, std::abs(cmp.before.values[k]));
        }
        rep.acf_after_frac_in_bound =
            static_cast<double>(in_bound) / static_cast<double>(config.acf_max_lag);
        rep.acf_before_max_abs = max_abs;
        std::ostringstream csv;
        csv << "lag,before,after,bound99_before,bound99_after\n";
        for (int k = 0; k <= config.acf_max_lag; ++k)
            csv << k << "," << cmp.before.values[k] << "," << cmp.after.values[k] << ","
                << cmp.before.bound99 << "," << cmp.after.bound99 << "\n";
        io::write_text(dir / "acf.csv", csv.str());
    } catch (const std::exception& e) {
        stage_fail("test", e.what());
    }

    // --- optional optical-gain projection (scenario arithmetic only) ---
    if (config.projection_gain_db > 0.0) {
        const double gain = std::pow(10.0, config.projection_gain_db / 10.0);
        const double dp = rep.budget.delta_p / std::sqrt(gain);
        const double dq = rep.budget.delta_q / std::sqrt(gain);
        double h = cal::min_entropy(dp, dq);
        h = std::min(h, static_cast<double>(rep.budget.raw_bits));
        rep.projected_h_min = h;
        rep.projected_gen_rate = cal::generation_rate(h, rep.budget.pair_rate);
    }

    // --- report + manifest ---
    io::write_text(dir / "report.json", rep.to_json() + "\n");
    json manifest = {{"config_hash", rep.config_hash},
                     {"simulation_seed", config.simulation_seed},
                     {"extractor_seed", config.extractor_seed},
                     {"seed_file", config.seed_file},
                     {"library", "qrng-pipeline 1.0"},
                     {"artifacts",
                      {"config.json", "production.qrt", "filtered_p.f64", "filtered_q.f64",
                       "calibration.csv", "packed.bits", "seed.bits", "extracted.bits",
                       "acf.csv", "report.json"}}};
    io::write_text(dir / "manifest.json", manifest.dump(2) + "\n");
    return rep;
}

} // namespace qrng
