// jpo: command line front end for the oscillator simulation toolkit.
#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "../src/experiment.hpp"
#include "jpo/trace_io.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOpts {
    std::string config;
    std::string output;
    int workers = 0;
    long long seed = -1;
    std::vector<std::string> formats;
};

void add_common(CLI::App* sub, CommonOpts& opts, bool config_required) {
    auto* c = sub->add_option("--config,-c", opts.config,
                              "experiment config (JSON)");
    if (config_required) c->required();
    sub->add_option("--output,-o", opts.output,
                    "output directory (overrides the config)");
    sub->add_option("--workers,-j", opts.workers,
                    "worker threads (overrides the config)");
    sub->add_option("--seed", opts.seed, "base RNG seed (overrides the config)");
    sub->add_option("--format", opts.formats,
                    "output formats: csv, json, svg (repeatable or "
                    "comma separated)")
        ->delimiter(',');
}

jpo::ExperimentConfig build_config(const CommonOpts& opts) {
    auto cfg = jpo::load_config(opts.config);
    if (!opts.output.empty()) cfg.output_dir = opts.output;
    if (cfg.output_dir.empty())
        throw jpo::ConfigError("no output directory (config or --output)");
    if (opts.workers > 0) cfg.workers = opts.workers;
    if (opts.seed >= 0) cfg.sim.seed = static_cast<std::uint64_t>(opts.seed);
    if (!opts.formats.empty()) {
        cfg.formats.clear();
        for (const auto& f : opts.formats) {
            if (f != "csv" && f != "json" && f != "svg")
                throw jpo::ConfigError("unknown format: " + f);
            cfg.formats.insert(f);
        }
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Parametric-oscillator trace synthesis and noise analysis"};
    app.require_subcommand(1);

    CommonOpts pot_opts, run_opts, ana_opts, val_opts;
    std::vector<std::string> analyze_inputs;
    std::string report_dir;
    std::vector<std::string> report_formats;

    auto* pot = app.add_subcommand(
        "potential", "potential cross sections and stationary points");
    add_common(pot, pot_opts, true);

    auto* run = app.add_subcommand(
        "run", "simulate the sweep and analyze every member");
    add_common(run, run_opts, true);

    auto* ana = app.add_subcommand(
        "analyze", "recompute spectra/statistics from existing traces");
    add_common(ana, ana_opts, true);
    ana->add_option("inputs", analyze_inputs,
                    "trace files or run directories")
        ->required();

    auto* rep = app.add_subcommand(
        "report", "figure bundle from a completed run directory");
    rep->add_option("run_dir", report_dir, "run directory")->required();
    rep->add_option("--format", report_formats,
                    "output formats: csv, json, svg (repeatable or "
                    "comma separated)")
        ->delimiter(',');

    auto* val = app.add_subcommand("validate-config",
                                   "parse and validate a config, then exit");
    val->add_option("--config,-c", val_opts.config, "experiment config (JSON)")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : jpo::kExitConfigError;
    }

    try {
        if (val->parsed()) {
            jpo::load_config(val_opts.config);
            std::printf("ok\n");
            return jpo::kExitOk;
        }
        if (pot->parsed()) return jpo::cmd_potential(build_config(pot_opts));
        if (run->parsed()) return jpo::cmd_run(build_config(run_opts));
        if (ana->parsed()) {
            std::vector<fs::path> inputs(analyze_inputs.begin(),
                                         analyze_inputs.end());
            return jpo::cmd_analyze(build_config(ana_opts), inputs);
        }
        if (rep->parsed()) {
            std::set<std::string> fmts(report_formats.begin(),
                                       report_formats.end());
            if (fmts.empty()) fmts = {"csv", "json", "svg"};
            return jpo::cmd_report(report_dir, fmts);
        }
    } catch (const jpo::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return jpo::kExitConfigError;
    } catch (const jpo::TraceFormatError& e) {
        std::fprintf(stderr, "trace format error: %s\n", e.what());
        return jpo::kExitIoError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return jpo::kExitIoError;
    }
    return jpo::kExitConfigError;
}
