// Overdamped Langevin dynamics in the oscillator potential: trace synthesis,
// Schmitt-trigger state labeling, histograms and switching-rate sweeps.
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "jpo/potential.hpp"

namespace jpo {

// Symbolic starting points resolved against the current potential.
enum class StartToken { well0, well1, saddle };

struct SimulationConfig {
    double dt = 2.5e-3;        // integration step
    double duration = 1e4;     // total simulated time
    double sample_rate = 1.0;  // output samples per unit time
    double noise_intensity = 0.0;  // D in dq = -grad U dt + sqrt(2D) dW
    std::uint64_t seed = 1;
    std::variant<StartToken, PhasePoint> initial_point = StartToken::well0;

    void validate() const;
};

struct TraceMetadata {
    ResonatorParams params;
    DriveConfig drive;
    SimulationConfig sim;
};

struct QuadratureTrace {
    double sample_rate = 1.0;
    std::vector<double> i_samples;  // q_x channel
    std::vector<double> q_samples;  // q_y channel
    std::uint64_t seed = 0;
    std::optional<TraceMetadata> metadata;

    std::size_t size() const { return i_samples.size(); }
    double duration() const {
        return static_cast<double>(i_samples.size()) / sample_rate;
    }
};

struct LabelConfig {
    // Schmitt-trigger thresholds on the projection axis; must straddle zero.
    double threshold_low = -0.5;
    double threshold_high = 0.5;
    // Unit projection axis (defaults to the inter-well q_x axis).
    double axis_x = 1.0;
    double axis_y = 0.0;
};

struct SwitchingStats {
    std::vector<std::uint8_t> labels;  // 0 = q_x < 0 well, 1 = q_x > 0 well
    std::vector<double> dwell_times;   // seconds per completed visit
    std::array<double, 2> occupation{0.0, 0.0};
    std::uint64_t switch_count = 0;
    double switching_rate = 0.0;  // switch_count / duration
};

struct HistogramResult {
    std::vector<double> bin_centers;
    std::vector<std::uint64_t> counts;
    double bin_width = 0.0;
};

enum class HistogramAxis { I, Q, projection };

// Thrown when the trajectory leaves the quartic's validity region.
struct InstabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Euler-Maruyama integration of dq = -grad U(q) dt + sqrt(2D) dW with
// independent Wiener increments per component, decimated to sample_rate.
// Deterministic given the seed. Throws InstabilityError if |q| exceeds
// four times the no-ILS well radius.
QuadratureTrace simulate_trace(const ResonatorParams& params,
                               const DriveConfig& drive,
                               const SimulationConfig& sim);

SwitchingStats label_states(const QuadratureTrace& trace,
                            const LabelConfig& rule);

HistogramResult histogram(const QuadratureTrace& trace, HistogramAxis axis,
                          int bins);

// Symmetric two-state Markov process over +-amplitude on the I channel
// (zeros on Q) with exponential dwell times of mean 1/rate. Reference
// input for the spectral estimators. Throws std::invalid_argument when
// rate >= sample_rate / 10 (aliasing).
QuadratureTrace telegraph_reference(double rate, double amplitude,
                                    double sample_rate, double duration,
                                    std::uint64_t seed);

struct KramersScanEntry {
    double ils_amplitude = 0.0;
    double switching_rate = 0.0;
    std::uint64_t switch_count = 0;
    std::optional<std::string> error;  // set when this member failed
};

// simulate_trace + label_states per amplitude; member i runs with seed
// derive_seed(sim.seed, i), so any member is reproducible standalone.
// Member failures are recorded in the entry, not thrown.
std::vector<KramersScanEntry> kramers_scan(
    const ResonatorParams& params, const DriveConfig& drive_base,
    const std::vector<double>& ils_amplitudes, const SimulationConfig& sim,
    const LabelConfig& rule);

}  // namespace jpo
