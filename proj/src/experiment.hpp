// Batch experiment runner behind the CLI: JSON configuration, sweep
// execution, artifact persistence and report generation.
#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "jpo/dynamics.hpp"
#include "jpo/spectra.hpp"

namespace jpo {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SweepMember {
    std::optional<double> ils_amplitude;  // |E_s|, exclusive with target_np
    std::optional<double> target_np;      // resolved via calib inversion
    std::optional<double> ils_phase;      // overrides the base drive phase
};

struct ExperimentConfig {
    ResonatorParams resonator;
    bool physical_units = false;
    DriveConfig drive_base;
    SimulationConfig sim;
    WelchConfig welch;
    double label_threshold_factor = 0.5;  // Schmitt thresholds at +-f*q_well
    int histogram_bins = 61;
    std::vector<SweepMember> sweep;
    std::filesystem::path output_dir;
    std::set<std::string> formats{"csv", "json"};
    int workers = 1;
    std::vector<std::pair<double, double>> fit_notches;
    std::optional<double> db_reference;  // adds a dB column when set

    // Cross-section grid for `potential`.
    double cross_section_halfwidth_factor = 2.0;  // times q_well
    int cross_section_points = 401;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::filesystem::path& path);

// Resolves a sweep member to a concrete drive (N_p targets via the
// photon-number inversion).
DriveConfig resolve_member_drive(const ExperimentConfig& cfg,
                                 const SweepMember& member);

// Exit codes shared with the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitPartialFailure = 3;
inline constexpr int kExitIoError = 4;

// Cross-section CSVs + stationary-point JSON per sweep member; monostable
// members are reported, not fatal.
int cmd_potential(const ExperimentConfig& cfg);

// Full simulate -> label -> spectra -> fit pipeline per member, plus a
// manifest with checksums. Returns kExitPartialFailure if any member failed.
int cmd_run(const ExperimentConfig& cfg);

// Re-analysis of existing traces (run dir or explicit files) with the
// configured Welch/fit settings.
int cmd_analyze(const ExperimentConfig& cfg,
                const std::vector<std::filesystem::path>& inputs);

// Figure bundle (trace strips, histograms, PSD overlay) from a completed
// run directory.
int cmd_report(const std::filesystem::path& run_dir,
               const std::set<std::string>& formats);

// FNV-1a 64 over a file's bytes, hex encoded; used by the manifest.
std::string file_checksum(const std::filesystem::path& path);

}  // namespace jpo
