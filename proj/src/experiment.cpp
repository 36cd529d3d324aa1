#include "experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <thread>

#include "jpo/calib.hpp"
#include "jpo/rng.hpp"
#include "jpo/fitting.hpp"
#include "jpo/trace_io.hpp"
#include "svg.hpp"

namespace jpo {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c",
                          "#d62728", "#9467bd", "#8c564b",
                          "#e377c2", "#7f7f7f", "#bcbd22"};

double require_number(const json& j, const std::string& key) {
    if (!j.contains(key) || !j[key].is_number())
        throw ConfigError("missing or non-numeric config key: " + key);
    return j[key].get<double>();
}

double number_or(const json& j, const std::string& key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number())
        throw ConfigError("non-numeric config key: " + key);
    return j[key].get<double>();
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig cfg;
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    // A run manifest embeds the config it was produced from; accept it
    // directly so a manifest can reproduce its own run.
    if (!j.contains("sweep") && j.contains("config") && j["config"].is_object())
        return config_from_json(j["config"]);

    const json res = j.value("resonator", json::object());
    const std::string units = res.value("units", "scaled");
    if (units == "physical") {
        cfg.physical_units = true;
        // *_hz keys carry kappa/2pi and omega/2pi, per the explicit-unit
        // key convention.
        cfg.resonator.kappa_ext = kTwoPi * require_number(res, "kappa_ext_hz");
        cfg.resonator.kappa_int = kTwoPi * number_or(res, "kappa_int_hz", 0.0);
        cfg.resonator.omega_s = kTwoPi * require_number(res, "omega_s_hz");
        cfg.resonator.gamma = require_number(res, "gamma");
    } else if (units == "scaled") {
        cfg.resonator.kappa_ext = number_or(res, "kappa_ext", 4.0);
        cfg.resonator.kappa_int = number_or(res, "kappa_int", 0.0);
        cfg.resonator.omega_s = number_or(res, "omega_s", 1.0);
        cfg.resonator.gamma = number_or(res, "gamma", -1.0 / 12.0);
    } else {
        throw ConfigError("resonator.units must be \"scaled\" or \"physical\"");
    }
    try {
        cfg.resonator.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid resonator: ") + e.what());
    }

    const json drv = j.value("drive", json::object());
    cfg.drive_base.pump_ratio = number_or(drv, "pump_ratio", 1.0);
    cfg.drive_base.ils_amplitude = number_or(drv, "ils_amplitude", 0.0);
    cfg.drive_base.ils_phase = number_or(drv, "ils_phase_rad", -M_PI / 2.0);
    try {
        cfg.drive_base.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid drive: ") + e.what());
    }

    const json sim = j.value("sim", json::object());
    cfg.sim.dt = number_or(sim, "dt", 2.5e-3);
    cfg.sim.duration = number_or(sim, "duration", 1e5);
    cfg.sim.sample_rate = number_or(sim, "sample_rate", 1.0);
    cfg.sim.noise_intensity = number_or(sim, "noise_intensity", 1.0 / 6.0);
    cfg.sim.seed = sim.value("seed", std::uint64_t{1});
    const std::string start = sim.value("initial_point", "well0");
    if (start == "well0")
        cfg.sim.initial_point = StartToken::well0;
    else if (start == "well1")
        cfg.sim.initial_point = StartToken::well1;
    else if (start == "saddle")
        cfg.sim.initial_point = StartToken::saddle;
    else
        throw ConfigError("sim.initial_point must be well0/well1/saddle");
    try {
        cfg.sim.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid sim config: ") + e.what());
    }

    const json welch = j.value("welch", json::object());
    cfg.welch.segment_length =
        welch.value("segment_length", std::size_t{1} << 16);
    cfg.welch.overlap_fraction = number_or(welch, "overlap_fraction", 0.5);
    const std::string window = welch.value("window", "hann");
    if (window == "hann")
        cfg.welch.window = WelchWindow::hann;
    else if (window == "rectangular")
        cfg.welch.window = WelchWindow::rectangular;
    else if (window == "blackman")
        cfg.welch.window = WelchWindow::blackman;
    else
        throw ConfigError("welch.window must be hann/rectangular/blackman");
    const std::string detrend = welch.value("detrend", "mean");
    if (detrend == "mean")
        cfg.welch.detrend = WelchDetrend::mean;
    else if (detrend == "none")
        cfg.welch.detrend = WelchDetrend::none;
    else
        throw ConfigError("welch.detrend must be mean/none");
    try {
        cfg.welch.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("invalid welch config: ") + e.what());
    }

    cfg.label_threshold_factor = number_or(j, "label_threshold_factor", 0.5);
    cfg.histogram_bins = static_cast<int>(number_or(j, "histogram_bins", 61));
    if (cfg.histogram_bins < 2)
        throw ConfigError("histogram_bins must be >= 2");

    if (!j.contains("sweep") || !j["sweep"].is_array() || j["sweep"].empty())
        throw ConfigError("config requires a nonempty sweep array");
    for (const auto& m : j["sweep"]) {
        SweepMember member;
        if (m.contains("ils_amplitude"))
            member.ils_amplitude = require_number(m, "ils_amplitude");
        if (m.contains("target_np"))
            member.target_np = require_number(m, "target_np");
        if (m.contains("ils_phase_rad"))
            member.ils_phase = require_number(m, "ils_phase_rad");
        if (member.ils_amplitude && member.target_np)
            throw ConfigError(
                "sweep member may give ils_amplitude or target_np, not both");
        if (!member.ils_amplitude && !member.target_np)
            throw ConfigError(
                "sweep member needs ils_amplitude or target_np");
        cfg.sweep.push_back(member);
    }

    if (j.contains("output_dir"))
        cfg.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("report_formats")) {
        cfg.formats.clear();
        for (const auto& f : j["report_formats"]) {
            std::string name = f.get<std::string>();
            if (name != "csv" && name != "json" && name != "svg")
                throw ConfigError("unknown report format: " + name);
            cfg.formats.insert(name);
        }
    }
    cfg.workers = static_cast<int>(number_or(j, "workers", 1.0));
    if (cfg.workers < 1) throw ConfigError("workers must be >= 1");
    if (j.contains("fit_notches")) {
        for (const auto& notch : j["fit_notches"]) {
            if (!notch.is_array() || notch.size() != 2)
                throw ConfigError("fit_notches entries must be [lo, hi]");
            cfg.fit_notches.emplace_back(notch[0].get<double>(),
                                         notch[1].get<double>());
        }
    }
    if (j.contains("db_reference"))
        cfg.db_reference = require_number(j, "db_reference");
    cfg.cross_section_halfwidth_factor =
        number_or(j, "cross_section_halfwidth_factor", 2.0);
    cfg.cross_section_points =
        static_cast<int>(number_or(j, "cross_section_points", 401));
    return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
    json j;
    if (cfg.physical_units) {
        j["resonator"] = {
            {"units", "physical"},
            {"kappa_ext_hz", cfg.resonator.kappa_ext / kTwoPi},
            {"kappa_int_hz", cfg.resonator.kappa_int / kTwoPi},
            {"omega_s_hz", cfg.resonator.omega_s / kTwoPi},
            {"gamma", cfg.resonator.gamma},
        };
    } else {
        j["resonator"] = {
            {"units", "scaled"},
            {"kappa_ext", cfg.resonator.kappa_ext},
            {"kappa_int", cfg.resonator.kappa_int},
            {"omega_s", cfg.resonator.omega_s},
            {"gamma", cfg.resonator.gamma},
        };
    }
    j["drive"] = {{"pump_ratio", cfg.drive_base.pump_ratio},
                  {"ils_amplitude", cfg.drive_base.ils_amplitude},
                  {"ils_phase_rad", cfg.drive_base.ils_phase}};
    std::string start = "well0";
    if (std::holds_alternative<StartToken>(cfg.sim.initial_point)) {
        auto tok = std::get<StartToken>(cfg.sim.initial_point);
        start = tok == StartToken::well0
                    ? "well0"
                    : (tok == StartToken::well1 ? "well1" : "saddle");
    }
    j["sim"] = {{"dt", cfg.sim.dt},
                {"duration", cfg.sim.duration},
                {"sample_rate", cfg.sim.sample_rate},
                {"noise_intensity", cfg.sim.noise_intensity},
                {"seed", cfg.sim.seed},
                {"initial_point", start}};
    std::string window = cfg.welch.window == WelchWindow::hann
                             ? "hann"
                             : (cfg.welch.window == WelchWindow::rectangular
                                    ? "rectangular"
                                    : "blackman");
    j["welch"] = {{"segment_length", cfg.welch.segment_length},
                  {"overlap_fraction", cfg.welch.overlap_fraction},
                  {"window", window},
                  {"detrend", cfg.welch.detrend == WelchDetrend::mean
                                  ? "mean"
                                  : "none"}};
    j["label_threshold_factor"] = cfg.label_threshold_factor;
    j["histogram_bins"] = cfg.histogram_bins;
    j["sweep"] = json::array();
    for (const auto& m : cfg.sweep) {
        json e = json::object();
        if (m.ils_amplitude) e["ils_amplitude"] = *m.ils_amplitude;
        if (m.target_np) e["target_np"] = *m.target_np;
        if (m.ils_phase) e["ils_phase_rad"] = *m.ils_phase;
        j["sweep"].push_back(e);
    }
    if (!cfg.output_dir.empty()) j["output_dir"] = cfg.output_dir.string();
    j["report_formats"] = cfg.formats;
    j["workers"] = cfg.workers;
    if (!cfg.fit_notches.empty()) {
        j["fit_notches"] = json::array();
        for (const auto& [lo, hi] : cfg.fit_notches)
            j["fit_notches"].push_back({lo, hi});
    }
    if (cfg.db_reference) j["db_reference"] = *cfg.db_reference;
    j["cross_section_halfwidth_factor"] = cfg.cross_section_halfwidth_factor;
    j["cross_section_points"] = cfg.cross_section_points;
    return j;
}

ExperimentConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return config_from_json(j);
}

DriveConfig resolve_member_drive(const ExperimentConfig& cfg,
                                 const SweepMember& member) {
    DriveConfig drive = cfg.drive_base;
    if (member.ils_amplitude)
        drive.ils_amplitude = *member.ils_amplitude;
    else
        drive.ils_amplitude =
            ils_amplitude_for_photon_number(*member.target_np, cfg.resonator);
    if (member.ils_phase) drive.ils_phase = *member.ils_phase;
    return drive;
}

namespace {

double member_photon_number(const ExperimentConfig& cfg,
                            const DriveConfig& drive) {
    // N_p = 4 kappa_ext |E_s|^2 / kappa_tot^2 (hbar omega cancels), valid in
    // scaled units as well.
    const double kt = cfg.resonator.kappa_tot();
    return 4.0 * cfg.resonator.kappa_ext * drive.ils_amplitude *
           drive.ils_amplitude / (kt * kt);
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.precision(17);
    return out;
}

void write_json_file(const fs::path& path, const json& j) {
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

void write_spectra_csv(const fs::path& path, const NoiseSpectra& s,
                       std::optional<double> db_reference) {
    auto out = open_out(path);
    out << "freq_hz,s_ii,s_qq,re_s_iq,im_s_iq,s_aa,s_bb,rotation_rad";
    if (db_reference) out << ",s_aa_db";
    out << '\n';
    for (std::size_t i = 0; i < s.frequencies.size(); ++i) {
        out << s.frequencies[i] << ',' << s.s_ii[i] << ',' << s.s_qq[i] << ','
            << s.s_iq[i].real() << ',' << s.s_iq[i].imag() << ',' << s.s_aa[i]
            << ',' << s.s_bb[i] << ',' << s.rotation_angle[i];
        if (db_reference)
            out << ','
                << 10.0 * std::log10(std::max(s.s_aa[i], 1e-300) /
                                     *db_reference);
        out << '\n';
    }
}

NoiseSpectra read_spectra_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    NoiseSpectra s;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        double f, sii, sqq, re, im, saa, sbb, rot;
        char c;
        ls >> f >> c >> sii >> c >> sqq >> c >> re >> c >> im >> c >> saa >>
            c >> sbb >> c >> rot;
        s.frequencies.push_back(f);
        s.s_ii.push_back(sii);
        s.s_qq.push_back(sqq);
        s.s_iq.emplace_back(re, im);
        s.s_aa.push_back(saa);
        s.s_bb.push_back(sbb);
        s.rotation_angle.push_back(rot);
    }
    return s;
}

void write_hist_csv(const fs::path& path, const HistogramResult& h) {
    auto out = open_out(path);
    out << "bin_center,count\n";
    for (std::size_t i = 0; i < h.bin_centers.size(); ++i)
        out << h.bin_centers[i] << ',' << h.counts[i] << '\n';
}

json stats_to_json(const SwitchingStats& stats) {
    return json{{"switch_count", stats.switch_count},
                {"switching_rate", stats.switching_rate},
                {"occupation", {stats.occupation[0], stats.occupation[1]}},
                {"dwell_count", stats.dwell_times.size()},
                {"mean_dwell",
                 stats.dwell_times.empty()
                     ? 0.0
                     : std::accumulate(stats.dwell_times.begin(),
                                       stats.dwell_times.end(), 0.0) /
                           static_cast<double>(stats.dwell_times.size())}};
}

json lorentzian_to_json(const LorentzianFit& fit) {
    return json{{"model", "lorentzian"},
                {"plateau", fit.plateau},
                {"corner_hz", fit.corner_hz},
                {"white_floor", fit.white_floor},
                {"residual", fit.residual},
                {"f_statistic", fit.f_statistic},
                {"accepted", fit.accepted}};
}

// Spectra + fits for one trace; shared by cmd_run and cmd_analyze so a
// re-analysis reproduces run outputs bit-exactly.
struct AnalysisArtifacts {
    NoiseSpectra spectra;
    json fit_report;
};

AnalysisArtifacts analyze_one(const ExperimentConfig& cfg,
                              const QuadratureTrace& trace,
                              const std::optional<SwitchingStats>& stats) {
    AnalysisArtifacts art;
    // Phase reference: the inter-well axis (q_x). The two oscillator states
    // differ by a pi phase flip, which moves the field along this axis, so
    // the phase-noise quadrature is the one aligned with it.
    art.spectra = diagonalize(noise_covariance(trace, cfg.welch), 0.0);

    json fits;
    fits["welch"] = {{"segment_length", cfg.welch.segment_length},
                     {"overlap_fraction", cfg.welch.overlap_fraction},
                     {"segment_count", art.spectra.segment_count}};
    FitMask mask{cfg.fit_notches};
    try {
        // DC bin excluded inside the fitter; also drop the Nyquist bin.
        std::vector<double> f(art.spectra.frequencies.begin(),
                              art.spectra.frequencies.end() - 1);
        std::vector<double> p(art.spectra.s_aa.begin(),
                              art.spectra.s_aa.end() - 1);
        auto lor = fit_lorentzian(f, p, mask);
        fits["lorentzian"] = lorentzian_to_json(lor);
        if (lor.accepted) {
            double lo = 3.0 * lor.corner_hz, hi = 10.0 * lor.corner_hz;
            hi = std::min(hi, f.back());
            try {
                auto pl = fit_powerlaw(f, p, {lo, hi});
                fits["rolloff_powerlaw"] = {{"exponent", pl.exponent},
                                            {"amplitude_1hz", pl.amplitude},
                                            {"band", {pl.band.first,
                                                      pl.band.second}},
                                            {"residual", pl.residual}};
            } catch (const std::exception& e) {
                fits["rolloff_powerlaw"] = {{"error", e.what()}};
            }
            if (stats && stats->switch_count >= 50) {
                auto rc = rate_consistency(*stats, lor);
                fits["rate_consistency"] = {
                    {"frequency_domain_rate", rc.frequency_domain_rate},
                    {"time_domain_rate", rc.time_domain_rate},
                    {"relative_discrepancy", rc.relative_discrepancy},
                    {"pass", rc.pass},
                    {"asymmetric_flag", rc.asymmetric_flag},
                    {"note", rc.note}};
            }
        }
    } catch (const std::exception& e) {
        fits["lorentzian"] = {{"error", e.what()}};
    }
    art.fit_report = std::move(fits);
    return art;
}

struct MemberOutcome {
    bool ok = false;
    std::string error;
    json summary;
};

}  // namespace

std::string file_checksum(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    char buf[65536];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ULL;
        }
        if (!in) break;
    }
    std::ostringstream os;
    os << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

int cmd_potential(const ExperimentConfig& cfg) {
    fs::create_directories(cfg.output_dir);
    const double qs = well_location_no_ils(cfg.resonator, cfg.drive_base);
    const double half = cfg.cross_section_halfwidth_factor * qs;
    std::vector<double> grid(static_cast<std::size_t>(cfg.cross_section_points));
    for (std::size_t i = 0; i < grid.size(); ++i)
        grid[i] = -half + 2.0 * half * static_cast<double>(i) /
                              static_cast<double>(grid.size() - 1);

    json report;
    report["members"] = json::array();
    svg::Plot plot("Potential cross sections U(q_x, 0)", "q_x", "U");
    bool any_failed = false;
    for (std::size_t i = 0; i < cfg.sweep.size(); ++i) {
        const DriveConfig drive = resolve_member_drive(cfg, cfg.sweep[i]);
        json member;
        member["index"] = i;
        member["ils_amplitude"] = drive.ils_amplitude;
        member["ils_phase_rad"] = drive.ils_phase;
        member["photon_number"] = member_photon_number(cfg, drive);

        auto curve = cross_section(cfg.resonator, drive, grid);
        if (cfg.formats.count("csv")) {
            auto out = open_out(cfg.output_dir /
                                ("cross_section_" + std::to_string(i) + ".csv"));
            out << "q_x,U\n";
            for (const auto& [x, u] : curve) out << x << ',' << u << '\n';
        }
        if (cfg.formats.count("svg")) {
            svg::Series s;
            for (const auto& [x, u] : curve) {
                s.x.push_back(x);
                s.y.push_back(u);
            }
            s.color = kPalette[i % std::size(kPalette)];
            std::ostringstream label;
            label.precision(3);
            label << "Np=" << member_photon_number(cfg, drive);
            s.label = label.str();
            plot.add(std::move(s));
        }

        auto points = find_stationary_points(cfg.resonator, drive);
        json pts = json::array();
        for (const auto& p : points) {
            const char* kind = p.kind == StationaryKind::minimum
                                   ? "minimum"
                                   : (p.kind == StationaryKind::saddle
                                          ? "saddle"
                                          : "maximum");
            pts.push_back({{"qx", p.location.qx},
                           {"qy", p.location.qy},
                           {"energy", p.energy},
                           {"kind", kind},
                           {"hess_eigs", {p.hessian_eigenvalues[0],
                                          p.hessian_eigenvalues[1]}}});
        }
        write_json_file(cfg.output_dir / ("stationary_points_" +
                                          std::to_string(i) + ".json"),
                        pts);
        try {
            auto bar = barrier_and_asymmetry(cfg.resonator, drive);
            member["barrier_from_each_well"] = {bar.barrier_from_each_well[0],
                                                bar.barrier_from_each_well[1]};
            member["well_energy_splitting"] = bar.well_energy_splitting;
            double deeper = 0.0;
            for (const auto& p : points)
                if (p.kind == StationaryKind::minimum)
                    deeper = std::min(deeper, p.energy);
            member["deeper_well_energy"] = deeper;
        } catch (const std::domain_error& e) {
            member["monostable"] = true;
            member["note"] = e.what();
            double emin = 0.0;
            for (const auto& p : points)
                if (p.kind == StationaryKind::minimum)
                    emin = std::min(emin, p.energy);
            member["deeper_well_energy"] = emin;
            any_failed = true;  // recorded, not fatal
        }
        report["members"].push_back(member);
    }
    if (cfg.formats.count("svg"))
        plot.write((cfg.output_dir / "cross_sections.svg").string());
    write_json_file(cfg.output_dir / "potential_report.json", report);
    (void)any_failed;  // monostable members are informational here
    return kExitOk;
}

int cmd_run(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(cfg.output_dir);
    const double qs = well_location_no_ils(cfg.resonator, cfg.drive_base);
    LabelConfig label;
    label.threshold_low = -cfg.label_threshold_factor * qs;
    label.threshold_high = cfg.label_threshold_factor * qs;

    const std::size_t n = cfg.sweep.size();
    std::vector<MemberOutcome> outcomes(n);
    std::atomic<std::size_t> next{0};

    auto worker = [&]() {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            MemberOutcome& out = outcomes[i];
            try {
                const DriveConfig drive = resolve_member_drive(cfg, cfg.sweep[i]);
                SimulationConfig sim = cfg.sim;
                sim.seed = derive_seed(cfg.sim.seed, i);
                const fs::path dir =
                    cfg.output_dir / ("member_" + std::to_string(i));
                fs::create_directories(dir);

                auto trace = simulate_trace(cfg.resonator, drive, sim);
                write_trace_binary(dir / "trace.jpotrace", trace);
                auto stats = label_states(trace, label);
                auto hist = histogram(trace, HistogramAxis::I,
                                      cfg.histogram_bins);
                write_hist_csv(dir / "histogram.csv", hist);
                write_json_file(dir / "stats.json", stats_to_json(stats));
                auto art = analyze_one(cfg, trace, stats);
                write_spectra_csv(dir / "spectra.csv", art.spectra,
                                  cfg.db_reference);
                write_json_file(dir / "fit.json", art.fit_report);

                out.summary = {{"index", i},
                               {"seed", sim.seed},
                               {"ils_amplitude", drive.ils_amplitude},
                               {"ils_phase_rad", drive.ils_phase},
                               {"photon_number",
                                member_photon_number(cfg, drive)},
                               {"switch_count", stats.switch_count},
                               {"switching_rate", stats.switching_rate},
                               {"status", "ok"}};
                out.ok = true;
            } catch (const std::exception& e) {
                out.error = e.what();
                out.summary = {{"index", i}, {"status", "failed"},
                               {"error", e.what()}};
            }
        }
    };
    const auto n_threads =
        std::max<std::size_t>(1, std::min<std::size_t>(
                                     static_cast<std::size_t>(cfg.workers), n));
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    json manifest;
    manifest["version"] = kVersion;
    manifest["config"] = config_to_json(cfg);
    manifest["base_seed"] = cfg.sim.seed;
    manifest["members"] = json::array();
    bool any_failed = false;
    for (const auto& out : outcomes) {
        manifest["members"].push_back(out.summary);
        if (!out.ok) any_failed = true;
    }
    json checksums = json::object();
    for (const auto& entry : fs::recursive_directory_iterator(cfg.output_dir)) {
        if (!entry.is_regular_file()) continue;
        auto rel = fs::relative(entry.path(), cfg.output_dir).generic_string();
        if (rel == "manifest.json") continue;
        checksums[rel] = file_checksum(entry.path());
    }
    manifest["checksums"] = checksums;
    manifest["wall_time_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    write_json_file(cfg.output_dir / "manifest.json", manifest);
    return any_failed ? kExitPartialFailure : kExitOk;
}

int cmd_analyze(const ExperimentConfig& cfg,
                const std::vector<fs::path>& inputs) {
    std::vector<fs::path> traces;
    for (const auto& input : inputs) {
        if (fs::is_directory(input)) {
            for (const auto& entry : fs::recursive_directory_iterator(input))
                if (entry.is_regular_file() &&
                    entry.path().filename() == "trace.jpotrace")
                    traces.push_back(entry.path());
        } else {
            traces.push_back(input);
        }
    }
    if (traces.empty()) {
        throw std::runtime_error("no trace files found in the given inputs");
    }
    std::sort(traces.begin(), traces.end());
    fs::create_directories(cfg.output_dir);
    const double qs = well_location_no_ils(cfg.resonator, cfg.drive_base);
    LabelConfig label;
    label.threshold_low = -cfg.label_threshold_factor * qs;
    label.threshold_high = cfg.label_threshold_factor * qs;

    bool any_failed = false, any_ok = false;
    json report;
    report["inputs"] = json::array();
    for (std::size_t i = 0; i < traces.size(); ++i) {
        json entry;
        entry["path"] = traces[i].string();
        try {
            auto trace = read_trace_any(traces[i]);
            auto stats = label_states(trace, label);
            auto art = analyze_one(cfg, trace, stats);
            std::string stem = traces[i].parent_path().filename().string();
            if (stem.empty() || stem == ".")
                stem = traces[i].stem().string();
            stem += "_" + std::to_string(i);
            write_spectra_csv(cfg.output_dir / (stem + "_spectra.csv"),
                              art.spectra, cfg.db_reference);
            write_json_file(cfg.output_dir / (stem + "_stats.json"),
                            stats_to_json(stats));
            write_json_file(cfg.output_dir / (stem + "_fit.json"),
                            art.fit_report);
            entry["status"] = "ok";
            any_ok = true;
        } catch (const std::exception& e) {
            entry["status"] = "failed";
            entry["error"] = e.what();
            any_failed = true;
        }
        report["inputs"].push_back(entry);
    }
    write_json_file(cfg.output_dir / "analyze_report.json", report);
    if (!any_ok) return kExitIoError;
    return any_failed ? kExitPartialFailure : kExitOk;
}

int cmd_report(const fs::path& run_dir, const std::set<std::string>& formats) {
    const fs::path manifest_path = run_dir / "manifest.json";
    if (!fs::exists(manifest_path))
        throw std::runtime_error("no manifest.json in " + run_dir.string() +
                                 " (not a completed run directory)");
    json manifest;
    {
        std::ifstream in(manifest_path);
        in >> manifest;
    }
    if (!manifest.contains("members") || manifest["members"].empty())
        throw std::runtime_error("run directory holds no members");

    const fs::path out_dir = run_dir / "report";
    fs::create_directories(out_dir);

    svg::Plot traces_plot("Time-trace strips (I quadrature)", "t", "I");
    svg::Plot hist_plot("Histograms of the I quadrature", "I", "count");
    svg::Plot psd_plot("Phase noise PSD", "frequency", "S_aa", true, true);

    json gaps = json::array();
    double psd_fmin = 1e300, psd_fmax = 0, psd_ref = 0;
    std::vector<json> members = manifest["members"];
    for (const auto& m : members) {
        const std::size_t i = m["index"].get<std::size_t>();
        const std::string color = kPalette[i % std::size(kPalette)];
        std::ostringstream label;
        label.precision(3);
        if (m.contains("photon_number"))
            label << "Np=" << m["photon_number"].get<double>();
        else
            label << "member " << i;
        const fs::path dir = run_dir / ("member_" + std::to_string(i));
        if (m.value("status", "failed") != "ok") {
            gaps.push_back({{"index", i}, {"reason", m.value("error", "failed")}});
            continue;
        }
        try {
            auto trace = read_trace_binary(dir / "trace.jpotrace");
            // Strip window mirroring a 15 ms crop of a 10 s record.
            auto strip = std::max<std::size_t>(
                std::min<std::size_t>(trace.size(), 200),
                static_cast<std::size_t>(0.0015 *
                                         static_cast<double>(trace.size())));
            {
                auto out = open_out(out_dir /
                                    ("strip_" + std::to_string(i) + ".csv"));
                out << "t,i\n";
                for (std::size_t k = 0; k < strip; ++k)
                    out << static_cast<double>(k) / trace.sample_rate << ','
                        << trace.i_samples[k] << '\n';
            }
            svg::Series ts;
            for (std::size_t k = 0; k < strip; ++k) {
                ts.x.push_back(static_cast<double>(k) / trace.sample_rate);
                ts.y.push_back(trace.i_samples[k]);
            }
            ts.color = color;
            ts.label = label.str();
            traces_plot.add(std::move(ts));

            std::ifstream hin(dir / "histogram.csv");
            if (hin) {
                std::string line;
                std::getline(hin, line);
                svg::Series hs;
                while (std::getline(hin, line)) {
                    std::istringstream ls(line);
                    double c, cnt;
                    char comma;
                    ls >> c >> comma >> cnt;
                    hs.x.push_back(c);
                    hs.y.push_back(cnt);
                }
                hs.color = color;
                hs.label = label.str();
                hist_plot.add(std::move(hs));
            }

            auto spectra = read_spectra_csv(dir / "spectra.csv");
            svg::Series ps;
            for (std::size_t k = 1; k + 1 < spectra.frequencies.size(); ++k) {
                if (spectra.s_aa[k] <= 0.0) continue;
                ps.x.push_back(spectra.frequencies[k]);
                ps.y.push_back(spectra.s_aa[k]);
                psd_fmin = std::min(psd_fmin, spectra.frequencies[k]);
                psd_fmax = std::max(psd_fmax, spectra.frequencies[k]);
                psd_ref = std::max(psd_ref, spectra.s_aa[k]);
            }
            ps.color = color;
            ps.label = label.str();
            psd_plot.add(std::move(ps));

            auto out = open_out(out_dir /
                                ("psd_" + std::to_string(i) + ".csv"));
            out << "freq_hz,s_aa\n";
            for (std::size_t k = 0; k < spectra.frequencies.size(); ++k)
                out << spectra.frequencies[k] << ',' << spectra.s_aa[k] << '\n';
        } catch (const std::exception& e) {
            gaps.push_back({{"index", i}, {"reason", e.what()}});
        }
    }

    // 1/f and 1/f^2 guide lines with exact log-log slopes -1 and -2.
    if (psd_fmax > psd_fmin) {
        auto guides = open_out(out_dir / "psd_guides.csv");
        guides << "freq_hz,one_over_f,one_over_f2\n";
        for (int s = 1; s <= 2; ++s) {
            svg::Series g;
            const double anchor = psd_ref * std::pow(psd_fmin, s);
            for (double f = psd_fmin; f <= psd_fmax * 1.0001;
                 f *= std::pow(psd_fmax / psd_fmin, 0.05))
                { g.x.push_back(f); g.y.push_back(anchor * std::pow(f, -s)); }
            g.color = "#555555";
            g.dotted = true;
            g.label = s == 1 ? "1/f" : "1/f^2";
            psd_plot.add(std::move(g));
        }
        const double anchor1 = psd_ref * psd_fmin;
        const double anchor2 = psd_ref * psd_fmin * psd_fmin;
        for (double f = psd_fmin; f <= psd_fmax * 1.0001;
             f *= std::pow(psd_fmax / psd_fmin, 0.05))
            guides << f << ',' << anchor1 / f << ',' << anchor2 / (f * f)
                   << '\n';
    }

    if (formats.count("svg")) {
        traces_plot.write((out_dir / "traces.svg").string());
        hist_plot.write((out_dir / "histograms.svg").string());
        psd_plot.write((out_dir / "psd.svg").string());
    }
    write_json_file(out_dir / "report.json",
                    json{{"gaps", gaps}, {"version", kVersion}});
    return gaps.empty() ? kExitOk : kExitPartialFailure;
}

}  // namespace jpo
