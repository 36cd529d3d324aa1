// Rotating-frame effective potential of the injection-locked parametric
// oscillator: value, derivatives and stationary-point structure.
#pragma once

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

namespace jpo {

// Loss rates, resonance frequency and Kerr nonlinearity of the resonator.
// gamma is stored signed and must be negative for a bounded-below double
// well along q_x; the quartic model is trusted only for |q| <~ 2*q_well.
struct ResonatorParams {
    double kappa_ext = 4.0;  // external loss rate
    double kappa_int = 0.0;  // internal loss rate
    double omega_s = 1.0;    // resonance (angular) frequency
    double gamma = -1.0 / 12.0;

    double kappa_tot() const { return kappa_ext + kappa_int; }

    // Throws std::invalid_argument on kappa_ext <= 0, kappa_int < 0,
    // omega_s <= 0 or gamma >= 0.
    void validate() const;
};

// Pump strength (as the ratio P_p/P_th) plus amplitude and phase of the
// injection-locking signal. The pump is at ~2*omega_s; only the ratio
// enters the potential.
struct DriveConfig {
    double pump_ratio = 1.0;     // P_p / P_th, >= 0
    double ils_amplitude = 0.0;  // |E_s| >= 0, sqrt(photons/s)
    double ils_phase = 0.0;      // theta_s, radians

    void validate() const;
};

struct PhasePoint {
    double qx = 0.0;
    double qy = 0.0;
};

enum class StationaryKind { minimum, saddle, maximum };

struct StationaryPoint {
    PhasePoint location;
    double energy = 0.0;
    StationaryKind kind = StationaryKind::minimum;
    std::array<double, 2> hessian_eigenvalues{0.0, 0.0};
};

struct SearchConfig {
    int max_iterations = 200;
    double gradient_tolerance = 1e-12;
    double dedup_radius_factor = 1e-6;  // times q_well
};

struct BarrierReport {
    // barrier[0]: from the q_x < 0 well, barrier[1]: from the q_x > 0 well.
    std::array<double, 2> barrier_from_each_well{0.0, 0.0};
    // U(min with q_x > 0) - U(min with q_x < 0).
    double well_energy_splitting = 0.0;
};

// U(q_x, q_y) = (kappa/4) sqrt(P_p/P_th) (q_y^2 - q_x^2)
//             - 3 gamma (q_x^2 + q_y^2)^2
//             + sqrt(kappa_ext) |E_s| (q_y cos theta_s - q_x sin theta_s)
double potential_value(const ResonatorParams& params, const DriveConfig& drive,
                       const PhasePoint& q);

// Analytic (dU/dq_x, dU/dq_y).
std::array<double, 2> potential_gradient(const ResonatorParams& params,
                                         const DriveConfig& drive,
                                         const PhasePoint& q);

// Analytic Hessian as {Uxx, Uxy, Uyy}.
std::array<double, 3> potential_hessian(const ResonatorParams& params,
                                        const DriveConfig& drive,
                                        const PhasePoint& q);

// Closed-form well coordinate sqrt(kappa sqrt(P_p/P_th) / (24 |gamma|)) of
// the symmetric (|E_s| = 0) potential; the two minima sit at (+-q_well, 0).
double well_location_no_ils(const ResonatorParams& params,
                            const DriveConfig& drive);

// Closed-form symmetric barrier kappa^2 (P_p/P_th) / (192 |gamma|).
double barrier_no_ils(const ResonatorParams& params, const DriveConfig& drive);

// Multi-start damped-Newton search on the gradient. Starts from the origin,
// the four axis points (+-q_well, 0), (0, +-q_well) and the four diagonals;
// the quartic has at most nine stationary points. Results are deduplicated
// and classified by Hessian eigenvalues, sorted by energy.
std::vector<StationaryPoint> find_stationary_points(
    const ResonatorParams& params, const DriveConfig& drive,
    const SearchConfig& search = {});

// Requires exactly two minima and a saddle; throws std::domain_error for a
// monostable configuration (ILS beyond the bistable range).
BarrierReport barrier_and_asymmetry(const ResonatorParams& params,
                                    const DriveConfig& drive,
                                    const SearchConfig& search = {});

// Sampled U(q_x, 0) along a caller-supplied grid.
std::vector<std::pair<double, double>> cross_section(
    const ResonatorParams& params, const DriveConfig& drive,
    const std::vector<double>& grid);

}  // namespace jpo
