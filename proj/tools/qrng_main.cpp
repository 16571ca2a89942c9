// qrng: vacuum-noise QRNG post-processing pipeline CLI.
//
// Subcommands: simulate, calibrate, autocorr, extract, test, run, report.
// `run` exits 0 only if every battery verdict passed and the m/n ratio
// condition held.

#include "qrng/calibration.hpp"
#include "qrng/dsp.hpp"
#include "qrng/errors.hpp"
#include "qrng/pipeline.hpp"
#include "qrng/source_sim.hpp"
#include "qrng/stattests.hpp"
#include "qrng/toeplitz.hpp"
#include "qrng/trace_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

qrng::PipelineConfig load_config(const std::string& config_path, bool preset_paper) {
    if (!config_path.empty()) return qrng::PipelineConfig::from_json_file(config_path);
    if (preset_paper) return qrng::PipelineConfig::paper_preset();
    throw qrng::Error("provide --config FILE or --preset-paper");
}

void print_category_table(const qrng::sts::TestReport& rep) {
    std::printf("%-22s %-12s %s\n", "Statistical Test", "P-value", "Result");
    std::printf("--------------------------------------------------\n");
    for (const auto& row : rep.by_category())
        std::printf("%-22s %-12.4g %s\n", row.name.c_str(), row.min_uniformity,
                    row.passed ? "PASSED" : "FAILED");
    std::printf("--------------------------------------------------\n");
    std::printf("streams: %zu x %zu bits, alpha=%g -> %s\n", rep.n_streams,
                rep.stream_bits, rep.alpha, rep.all_passed ? "ALL PASSED" : "FAILURES");
}

int cmd_simulate(const std::string& config_path, bool preset_paper, const std::string& out,
                 size_t n_samples, uint64_t seed, double photocurrent_ua,
                 double full_scale_mv, unsigned threads) {
    auto cfg = load_config(config_path, preset_paper);
    if (photocurrent_ua >= 0) cfg.source.photocurrent = photocurrent_ua * 1e-6;
    if (full_scale_mv > 0) cfg.adc.full_scale = full_scale_mv * 1e-3;
    if (n_samples) cfg.production_samples = n_samples;
    const auto trace = qrng::simulate_trace(cfg.source, cfg.adc, cfg.production_samples,
                                            seed, threads);
    qrng::io::write_trace(out, trace);
    std::printf("wrote %zu (p,q) pairs to %s (I=%.3g uA, N=%d, fs=%.3g GS/s)\n",
                trace.size(), out.c_str(), trace.photocurrent * 1e6, trace.adc.bits,
                trace.adc.sample_rate / 1e9);
    return 0;
}

int cmd_calibrate(const std::string& config_path, bool preset_paper,
                  const std::string& traces_dir, const std::string& json_out,
                  const std::string& csv_out, double operating_ua) {
    auto cfg = load_config(config_path, preset_paper);

    std::vector<qrng::RawTrace> traces;
    for (const auto& entry : fs::directory_iterator(traces_dir)) {
        if (entry.path().extension() == ".qrt") {
            traces.push_back(qrng::io::read_trace(entry.path()));
        } else if (entry.path().extension() == ".bin") {
            // headerless dump with a sidecar descriptor next to it
            auto sidecar = entry.path();
            sidecar.replace_extension(".json");
            if (fs::exists(sidecar))
                traces.push_back(qrng::io::ingest_headerless(
                    entry.path(), qrng::io::read_descriptor(sidecar)));
        }
    }
    if (traces.size() < 2) throw qrng::Error("calibrate: need >= 2 trace files in " + traces_dir);
    std::sort(traces.begin(), traces.end(),
              [](const auto& a, const auto& b) { return a.photocurrent < b.photocurrent; });

    const auto kernel = qrng::dsp::design_bandpass(cfg.band_low, cfg.band_high,
                                                   traces[0].adc.sample_rate, cfg.filter_taps);
    const auto outcome = qrng::calibrate_traces(traces, kernel);

    double i_op = operating_ua > 0 ? operating_ua * 1e-6 : traces.back().photocurrent;
    const double pair_rate = traces[0].adc.sample_rate / 10.0; // nominal; run_pipeline refines
    const auto budget = qrng::cal::build_budget(outcome.fit, i_op, traces[0].adc, pair_rate);

    json j = {{"slope_p", outcome.fit.slope_p},
              {"slope_q", outcome.fit.slope_q},
              {"intercept_p", outcome.fit.intercept_p},
              {"intercept_q", outcome.fit.intercept_q},
              {"residual_rms", outcome.fit.residual_rms},
              {"k_p", budget.k_p},
              {"k_q", budget.k_q},
              {"delta_p", budget.delta_p},
              {"delta_q", budget.delta_q},
              {"h_min", budget.h_min},
              {"gen_rate", budget.gen_rate},
              {"operating_photocurrent_a", i_op}};
    if (json_out.empty()) {
        std::cout << j.dump(2) << "\n";
    } else {
        qrng::io::write_text(json_out, j.dump(2) + "\n");
    }
    std::string csv = "photocurrent_a,var_p_code2,var_q_code2\n";
    for (const auto& pt : outcome.points)
        csv += std::to_string(pt.photocurrent) + "," + std::to_string(pt.var_p) + "," +
               std::to_string(pt.var_q) + "\n";
    if (!csv_out.empty()) qrng::io::write_text(csv_out, csv);
    return 0;
}

int cmd_autocorr(const std::string& trace_path, const std::string& channel, bool raw,
                 int max_lag, const std::string& config_path, bool preset_paper,
                 const std::string& out, const std::string& descriptor) {
    auto cfg = load_config(config_path, preset_paper);
    const auto trace = descriptor.empty()
                           ? qrng::io::read_trace(trace_path)
                           : qrng::io::ingest_headerless(
                                 trace_path, qrng::io::read_descriptor(descriptor));
    const auto& codes = channel == "q" ? trace.q_codes : trace.p_codes;
    std::vector<double> x;
    if (raw) {
        x.assign(codes.begin(), codes.end());
    } else {
        const auto kernel = qrng::dsp::design_bandpass(cfg.band_low, cfg.band_high,
                                                       trace.adc.sample_rate, cfg.filter_taps);
        x = qrng::dsp::apply_filter(std::span<const int16_t>(codes), kernel);
    }
    const auto acf = qrng::dsp::autocorrelation(x, max_lag);
    std::string csv = "lag,value,bound99\n";
    for (size_t k = 0; k < acf.values.size(); ++k)
        csv += std::to_string(acf.lags[k]) + "," + std::to_string(acf.values[k]) + "," +
               std::to_string(acf.bound99) + "\n";
    if (out.empty())
        std::cout << csv;
    else
        qrng::io::write_text(out, csv);
    return 0;
}

int cmd_extract(const std::string& in, const std::string& out, size_t n, size_t m,
                const std::string& seed_file, uint64_t seed, double hmin, int raw_bits,
                bool insecure_allow, unsigned threads) {
    const auto bits = qrng::io::read_bits(in);
    const double eps = qrng::ext::eps_exponent(n, m, hmin, raw_bits);
    const double ratio = double(m) / double(n);
    const double budget = hmin / double(raw_bits);
    std::printf("eps_exp = %.4f, m/n = %.6f, h_min/raw = %.6f\n", eps, ratio, budget);
    if (ratio >= budget && !insecure_allow) {
        std::fprintf(stderr, "refusing: ratio condition m/n < h_min/2N fails "
                             "(use --insecure-allow to override)\n");
        return 2;
    }
    qrng::BitVec seed_bits = seed_file.empty()
                                 ? qrng::ext::expand_seed_bits(seed, n + m - 1)
                                 : qrng::io::read_seed_file(seed_file, n + m - 1);
    const auto spec = qrng::ext::ToeplitzSpec::make(n, m, std::move(seed_bits), hmin,
                                                    raw_bits, insecure_allow);
    const auto extracted = qrng::ext::extract_stream(bits, spec, threads);
    qrng::io::write_bits(out, extracted);
    std::printf("extracted %zu bits from %zu input bits (%zu blocks)\n", extracted.size(),
                bits.size(), extracted.size() / m);
    return 0;
}

int cmd_test(const std::string& in, size_t stream_bits, size_t n_streams, double alpha,
             const std::string& json_out) {
    const auto bits = qrng::io::read_bits(in);
    if (n_streams == 0) n_streams = bits.size() / stream_bits;
    const auto rep = qrng::sts::run_battery(bits, stream_bits, n_streams, alpha);
    print_category_table(rep);
    if (!json_out.empty()) {
        json insts = json::array();
        for (const auto& ti : rep.instances)
            insts.push_back({{"name", ti.name},
                             {"category", ti.category},
                             {"uniformity_P", ti.uniformity},
                             {"proportion", ti.proportion},
                             {"verdict", ti.passed ? "PASSED" : "FAILED"},
                             {"p_values", ti.p_values}});
        json j = {{"stream_bits", rep.stream_bits},
                  {"n_streams", rep.n_streams},
                  {"alpha", rep.alpha},
                  {"all_passed", rep.all_passed},
                  {"instances", insts}};
        qrng::io::write_text(json_out, j.dump(2) + "\n");
    }
    return rep.all_passed ? 0 : 1;
}

int cmd_run(const std::string& config_path, bool preset_paper, const std::string& out_dir,
            unsigned threads, double projection_gain_db) {
    auto cfg = load_config(config_path, preset_paper);
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (threads) cfg.threads = threads;
    if (projection_gain_db > 0) cfg.projection_gain_db = projection_gain_db;
    const auto rep = qrng::run_pipeline(cfg);

    std::printf("h_min        = %.1f bits/pair (delta_p=%.4g, delta_q=%.4g)%s\n",
                rep.budget.h_min, rep.budget.delta_p, rep.budget.delta_q,
                rep.budget.clamped ? "  [clamped to 2N]" : "");
    std::printf("pair rate    = %.4g pairs/s (downsample x%zu%s)\n", rep.budget.pair_rate,
                rep.downsample_factor,
                rep.first_zero ? (" at first ACF zero lag " + std::to_string(rep.first_zero)).c_str()
                               : "");
    std::printf("gen rate     = %.4g bit/s\n", rep.budget.gen_rate);
    std::printf("variance     = %.4f / %.4f vacuum units (p/q)\n", rep.variance_vu_p,
                rep.variance_vu_q);
    std::printf("extractor    = %zux%zu, eps_exp %.2f, ratio %s\n", rep.extractor_m,
                rep.extractor_n, rep.eps_exp, rep.ratio_ok ? "ok" : "VIOLATED");
    if (rep.projected_h_min)
        std::printf("projection   = %.1f bits -> %.4g bit/s\n", *rep.projected_h_min,
                    *rep.projected_gen_rate);
    print_category_table(rep.tests);
    std::printf("report: %s/report.json\n", cfg.output_dir.c_str());
    return rep.overall_pass() ? 0 : 1;
}

int cmd_report(const std::string& in) {
    std::ifstream f(in);
    if (!f) throw qrng::Error("cannot open report: " + in);
    json j;
    f >> j;
    std::printf("h_min     = %.1f bits/pair\n", j["budget"]["h_min_bits"].get<double>());
    std::printf("gen rate  = %.4g bit/s\n", j["budget"]["gen_rate_bps"].get<double>());
    std::printf("variance  = %.4f / %.4f VU\n", j["variance_vu"]["p"].get<double>(),
                j["variance_vu"]["q"].get<double>());
    std::printf("extractor = %zux%zu eps_exp=%.2f ratio_ok=%s\n",
                j["extractor"]["m"].get<size_t>(), j["extractor"]["n"].get<size_t>(),
                j["extractor"]["eps_exp"].get<double>(),
                j["extractor"]["ratio_condition_ok"].get<bool>() ? "yes" : "no");
    std::printf("%-22s %-12s %s\n", "Statistical Test", "P-value", "Result");
    for (const auto& row : j["tests"]["categories"])
        std::printf("%-22s %-12.4g %s\n", row["name"].get<std::string>().c_str(),
                    row["P_value"].get<double>(), row["verdict"].get<std::string>().c_str());
    std::printf("overall: %s\n", j["overall_pass"].get<bool>() ? "PASS" : "FAIL");
    return j["overall_pass"].get<bool>() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vacuum-noise QRNG post-processing pipeline"};
    app.require_subcommand(1);

    std::string config_path, out, traces_dir, json_out, csv_out, channel = "p", in;
    std::string seed_file, out_dir, descriptor;
    bool preset_paper = false, raw = false, insecure_allow = false;
    size_t n_samples = 0, n = 15000, m = 10788, stream_bits = 1000000, n_streams = 0;
    uint64_t seed = 1;
    int max_lag = 100, raw_bits = 24;
    double photocurrent_ua = -1, full_scale_mv = -1, operating_ua = -1, alpha = 0.01;
    double hmin = 17.5, projection_gain_db = 0;
    unsigned threads = 0;

    auto add_cfg = [&](CLI::App* c) {
        c->add_option("--config", config_path, "pipeline config JSON");
        c->add_flag("--preset-paper", preset_paper, "use the built-in operating point");
    };

    auto* sim = app.add_subcommand("simulate", "generate a synthetic trace file");
    add_cfg(sim);
    sim->add_option("--out", out, "output trace file")->required();
    sim->add_option("--n-samples", n_samples, "number of (p,q) pairs");
    sim->add_option("--seed", seed, "simulation seed");
    sim->add_option("--photocurrent-ua", photocurrent_ua, "LO photocurrent [uA]");
    sim->add_option("--full-scale-mv", full_scale_mv, "ADC full scale [mV]");
    sim->add_option("--threads", threads, "worker threads (0 = auto)");

    auto* calib = app.add_subcommand("calibrate", "fit variance vs photocurrent from traces");
    add_cfg(calib);
    calib->add_option("--traces", traces_dir, "directory of .qrt files")->required();
    calib->add_option("--json-out", json_out, "write fit/budget JSON here (default stdout)");
    calib->add_option("--csv-out", csv_out, "write (I, var_p, var_q) CSV here");
    calib->add_option("--operating-ua", operating_ua, "operating photocurrent [uA]");

    auto* ac = app.add_subcommand("autocorr", "autocorrelation CSV of a trace channel");
    add_cfg(ac);
    ac->add_option("--in", in, "trace file")->required();
    ac->add_option("--channel", channel, "p or q")->check(CLI::IsMember({"p", "q"}));
    ac->add_flag("--raw", raw, "skip the band-pass");
    ac->add_option("--max-lag", max_lag, "maximum lag");
    ac->add_option("--out", out, "output CSV (default stdout)");
    ac->add_option("--descriptor", descriptor, "sidecar JSON for headerless dumps");

    auto* ex = app.add_subcommand("extract", "Toeplitz-hash a packed bit file");
    ex->add_option("--in", in, "packed input bits")->required();
    ex->add_option("--out", out, "extracted output bits")->required();
    ex->add_option("--n", n, "input block bits");
    ex->add_option("--m", m, "output block bits");
    ex->add_option("--seed-file", seed_file, "raw seed bits, n+m-1 of them");
    ex->add_option("--seed", seed, "64-bit master seed when no seed file");
    ex->add_option("--hmin", hmin, "certified bits per raw-bits block");
    ex->add_option("--raw-bits", raw_bits, "raw bits per sample pair (2N)");
    ex->add_flag("--insecure-allow", insecure_allow, "run even if the ratio condition fails");
    ex->add_option("--threads", threads, "worker threads (0 = auto)");

    auto* tst = app.add_subcommand("test", "run the statistical battery on extracted bits");
    tst->add_option("--in", in, "extracted bit file")->required();
    tst->add_option("--stream-bits", stream_bits, "bits per stream");
    tst->add_option("--n-streams", n_streams, "streams (0 = as many as fit)");
    tst->add_option("--alpha", alpha, "per-stream significance level");
    tst->add_option("--json-out", json_out, "also write a JSON report");

    auto* run = app.add_subcommand("run", "full pipeline");
    add_cfg(run);
    run->add_option("--out-dir", out_dir, "run directory (overrides config)");
    run->add_option("--threads", threads, "worker threads (0 = auto)");
    run->add_option("--project-gain-db", projection_gain_db,
                    "also report the budget with this much extra optical power");

    auto* repc = app.add_subcommand("report", "pretty-print a report.json");
    repc->add_option("--in", in, "report.json path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed())
            return cmd_simulate(config_path, preset_paper, out, n_samples, seed,
                                photocurrent_ua, full_scale_mv, threads);
        if (calib->parsed())
            return cmd_calibrate(config_path, preset_paper, traces_dir, json_out, csv_out,
                                 operating_ua);
        if (ac->parsed())
            return cmd_autocorr(in, channel, raw, max_lag, config_path, preset_paper, out,
                                descriptor);
        if (ex->parsed())
            return cmd_extract(in, out, n, m, seed_file, seed, hmin, raw_bits,
                               insecure_allow, threads);
        if (tst->parsed()) return cmd_test(in, stream_bits, n_streams, alpha, json_out);
        if (run->parsed())
            return cmd_run(config_path, preset_paper, out_dir, threads, projection_gain_db);
        if (repc->parsed()) return cmd_report(in);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 1;
}
