// Power conversions and the intracavity photon-number calibration.
#pragma once

#include "jpo/potential.hpp"

namespace jpo {

// CODATA 2018 reduced Planck constant, J s.
inline constexpr double kHBar = 1.054571817e-34;

// N_p = 4 P_s kappa_ext / (hbar omega_s kappa_tot^2).
double photon_number(double p_s_watts, const ResonatorParams& params);

// Inverse of photon_number: ILS power producing a given N_p.
double ils_power_for_photon_number(double n_p, const ResonatorParams& params);

// |E_s| = sqrt(P_s / (hbar omega_s)).
double ils_amplitude_from_power(double p_s_watts,
                                const ResonatorParams& params);

// |E_s| for a target N_p: (kappa_tot / 2) sqrt(N_p / kappa_ext). This form
// holds in scaled units as well, since hbar omega_s cancels.
double ils_amplitude_for_photon_number(double n_p,
                                       const ResonatorParams& params);

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);  // throws std::domain_error for w <= 0

// P_p / P_th; throws std::domain_error when p_th <= 0.
double pump_ratio_from_powers(double p_p_watts, double p_th_watts);

}  // namespace jpo
