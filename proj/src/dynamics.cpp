#include "jpo/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "jpo/rng.hpp"

namespace jpo {

void SimulationConfig::validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    if (!(duration > 0.0)) throw std::invalid_argument("duration must be > 0");
    if (!(sample_rate > 0.0))
        throw std::invalid_argument("sample_rate must be > 0");
    if (!(noise_intensity >= 0.0))
        throw std::invalid_argument("noise_intensity must be >= 0");
    if (dt > 1.0 / sample_rate + 1e-12)
        throw std::invalid_argument("dt must not exceed the sampling interval");
    double samples = sample_rate * duration;
    if (std::abs(samples - std::round(samples)) > 1e-6)
        throw std::invalid_argument(
            "sample_rate * duration must be an integer sample count");
    double stride = 1.0 / (sample_rate * dt);
    if (std::abs(stride - std::round(stride)) > 1e-6)
        throw std::invalid_argument(
            "sampling interval must be an integer multiple of dt");
}

namespace {

PhasePoint resolve_initial_point(const ResonatorParams& params,
                                 const DriveConfig& drive,
                                 const SimulationConfig& sim) {
    if (std::holds_alternative<PhasePoint>(sim.initial_point))
        return std::get<PhasePoint>(sim.initial_point);
    auto token = std::get<StartToken>(sim.initial_point);
    if (token == StartToken::saddle) {
        for (const auto& p : find_stationary_points(params, drive))
            if (p.kind == StationaryKind::saddle) return p.location;
        throw std::domain_error("no saddle point in this configuration");
    }
    // well0: the minimum with q_x > 0, well1: q_x < 0. With a single
    // (monostable) minimum both tokens resolve to it.
    const StationaryPoint* best = nullptr;
    const bool positive = (token == StartToken::well0);
    std::vector<StationaryPoint> points = find_stationary_points(params, drive);
    std::vector<const StationaryPoint*> minima;
    for (const auto& p : points)
        if (p.kind == StationaryKind::minimum) minima.push_back(&p);
    if (minima.empty())
        throw std::domain_error("no potential minimum to start from");
    for (const auto* m : minima) {
        if ((positive && m->location.qx > 0.0) ||
            (!positive && m->location.qx < 0.0)) {
            if (best == nullptr || m->energy < best->energy) best = m;
        }
    }
    if (best == nullptr) best = minima.front();
    return best->location;
}

}  // namespace

QuadratureTrace simulate_trace(const ResonatorParams& params,
                               const DriveConfig& drive,
                               const SimulationConfig& sim) {
    params.validate();
    drive.validate();
    sim.validate();

    const auto n_samples =
        static_cast<std::size_t>(std::llround(sim.sample_rate * sim.duration));
    const auto stride =
        static_cast<std::size_t>(std::llround(1.0 / (sim.sample_rate * sim.dt)));

    PhasePoint q = resolve_initial_point(params, drive, sim);
    const double escape = 4.0 * well_location_no_ils(params, drive);
    const double escape2 = escape * escape;
    const double sigma = std::sqrt(2.0 * sim.noise_intensity * sim.dt);

    // Drift coefficients of -grad U, inlined for the hot loop.
    const double pump = (params.kappa_tot() / 2.0) * std::sqrt(drive.pump_ratio);
    const double g12 = 12.0 * params.gamma;
    const double ils = std::sqrt(params.kappa_ext) * drive.ils_amplitude;
    const double fx_const = ils * std::sin(drive.ils_phase);
    const double fy_const = -ils * std::cos(drive.ils_phase);

    NormalRng rng(sim.seed);
    QuadratureTrace trace;
    trace.sample_rate = sim.sample_rate;
    trace.seed = sim.seed;
    trace.i_samples.reserve(n_samples);
    trace.q_samples.reserve(n_samples);
    trace.metadata = TraceMetadata{params, drive, sim};

    const double dt = sim.dt;
    for (std::size_t k = 0; k < n_samples; ++k) {
        trace.i_samples.push_back(q.qx);
        trace.q_samples.push_back(q.qy);
        for (std::size_t s = 0; s < stride; ++s) {
            const double r2 = q.qx * q.qx + q.qy * q.qy;
            const double fx = (pump + g12 * r2) * q.qx + fx_const;
            const double fy = (-pump + g12 * r2) * q.qy + fy_const;
            if (sigma > 0.0) {
                q.qx += fx * dt + sigma * rng.normal();
                q.qy += fy * dt + sigma * rng.normal();
            } else {
                q.qx += fx * dt;
                q.qy += fy * dt;
            }
        }
        if (q.qx * q.qx + q.qy * q.qy > escape2)
            throw InstabilityError(
                "trajectory left the validity region |q| > 4 q_well; reduce "
                "dt or noise_intensity");
    }
    return trace;
}

SwitchingStats label_states(const QuadratureTrace& trace,
                            const LabelConfig& rule) {
    if (trace.size() < 1) throw std::invalid_argument("empty trace");
    if (!(rule.threshold_low < 0.0 && rule.threshold_high > 0.0))
        throw std::invalid_argument(
            "Schmitt thresholds must straddle zero (low < 0 < high)");
    const double norm = std::hypot(rule.axis_x, rule.axis_y);
    if (!(norm > 0.0)) throw std::invalid_argument("zero projection axis");
    const double ax = rule.axis_x / norm, ay = rule.axis_y / norm;

    SwitchingStats stats;
    const std::size_t n = trace.size();
    stats.labels.resize(n);

    // Initial state from the first sample's side of zero; it only becomes
    // "committed" once a threshold is crossed, matching a Schmitt trigger
    // armed at the first excursion.
    double p0 = ax * trace.i_samples[0] + ay * trace.q_samples[0];
    std::uint8_t state = p0 >= 0.0 ? 1 : 0;
    std::size_t run_start = 0;
    std::array<std::size_t, 2> counts{0, 0};
    for (std::size_t k = 0; k < n; ++k) {
        const double p = ax * trace.i_samples[k] + ay * trace.q_samples[k];
        if (state == 1 && p < rule.threshold_low) {
            state = 0;
            ++stats.switch_count;
            stats.dwell_times.push_back(static_cast<double>(k - run_start) /
                                        trace.sample_rate);
            run_start = k;
        } else if (state == 0 && p > rule.threshold_high) {
            state = 1;
            ++stats.switch_count;
            stats.dwell_times.push_back(static_cast<double>(k - run_start) /
                                        trace.sample_rate);
            run_start = k;
        }
        stats.labels[k] = state;
        ++counts[state];
    }
    stats.occupation = {static_cast<double>(counts[0]) / static_cast<double>(n),
                        static_cast<double>(counts[1]) / static_cast<double>(n)};
    stats.switching_rate =
        static_cast<double>(stats.switch_count) / trace.duration();
    return stats;
}

HistogramResult histogram(const QuadratureTrace& trace, HistogramAxis axis,
                          int bins) {
    if (bins < 2) throw std::invalid_argument("need at least 2 bins");
    if (trace.size() == 0) throw std::invalid_argument("empty trace");
    std::vector<double> values(trace.size());
    for (std::size_t k = 0; k < trace.size(); ++k) {
        switch (axis) {
            case HistogramAxis::I: values[k] = trace.i_samples[k]; break;
            case HistogramAxis::Q: values[k] = trace.q_samples[k]; break;
            case HistogramAxis::projection:
                values[k] = trace.i_samples[k];
                break;
        }
    }
    auto [mn_it, mx_it] = std::minmax_element(values.begin(), values.end());
    double mn = *mn_it, mx = *mx_it;
    if (mx == mn) mx = mn + 1.0;  // constant trace: one occupied bin
    HistogramResult h;
    h.bin_width = (mx - mn) / bins;
    h.counts.assign(static_cast<std::size_t>(bins), 0);
    h.bin_centers.resize(static_cast<std::size_t>(bins));
    for (int b = 0; b < bins; ++b)
        h.bin_centers[static_cast<std::size_t>(b)] =
            mn + (b + 0.5) * h.bin_width;
    for (double v : values) {
        auto b = static_cast<std::size_t>((v - mn) / h.bin_width);
        if (b >= h.counts.size()) b = h.counts.size() - 1;
        ++h.counts[b];
    }
    return h;
}

QuadratureTrace telegraph_reference(double rate, double amplitude,
                                    double sample_rate, double duration,
                                    std::uint64_t seed) {
    if (!(rate > 0.0)) throw std::invalid_argument("rate must be > 0");
    if (!(sample_rate > 0.0))
        throw std::invalid_argument("sample_rate must be > 0");
    if (!(duration > 0.0)) throw std::invalid_argument("duration must be > 0");
    if (rate >= sample_rate / 10.0)
        throw std::invalid_argument(
            "telegraph rate too close to the sample rate (aliasing); need "
            "rate < sample_rate / 10");

    const auto n = static_cast<std::size_t>(std::llround(sample_rate * duration));
    QuadratureTrace trace;
    trace.sample_rate = sample_rate;
    trace.seed = seed;
    trace.i_samples.assign(n, 0.0);
    trace.q_samples.assign(n, 0.0);
    if (amplitude == 0.0) return trace;

    NormalRng rng(seed);
    double level = (rng.uniform() < 0.5) ? -amplitude : amplitude;
    double next_flip = rng.exponential(rate);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / sample_rate;
        while (t >= next_flip) {
            level = -level;
            next_flip += rng.exponential(rate);
        }
        trace.i_samples[k] = level;
    }
    return trace;
}

std::vector<KramersScanEntry> kramers_scan(
    const ResonatorParams& params, const DriveConfig& drive_base,
    const std::vector<double>& ils_amplitudes, const SimulationConfig& sim,
    const LabelConfig& rule) {
    std::vector<KramersScanEntry> entries;
    entries.reserve(ils_amplitudes.size());
    for (std::size_t i = 0; i < ils_amplitudes.size(); ++i) {
        KramersScanEntry entry;
        entry.ils_amplitude = ils_amplitudes[i];
        DriveConfig drive = drive_base;
        drive.ils_amplitude = ils_amplitudes[i];
        SimulationConfig member = sim;
        member.seed = derive_seed(sim.seed, i);
        try {
            auto trace = simulate_trace(params, drive, member);
            auto stats = label_states(trace, rule);
            entry.switching_rate = stats.switching_rate;
            entry.switch_count = stats.switch_count;
        } catch (const std::exception& e) {
            entry.error = e.what();
        }
        entries.push_back(std::move(entry));
    }
    return entries;
}

}  // namespace jpo
