#include "jpo/calib.hpp"

#include <cmath>
#include <stdexcept>

namespace jpo {

double photon_number(double p_s_watts, const ResonatorParams& params) {
    params.validate();
    if (!(p_s_watts >= 0.0))
        throw std::invalid_argument("ILS power must be >= 0");
    const double ktot = params.kappa_tot();
    return 4.0 * p_s_watts * params.kappa_ext /
           (kHBar * params.omega_s * ktot * ktot);
}

double ils_power_for_photon_number(double n_p, const ResonatorParams& params) {
    params.validate();
    if (!(n_p >= 0.0)) throw std::invalid_argument("N_p must be >= 0");
    const double ktot = params.kappa_tot();
    return n_p * kHBar * params.omega_s * ktot * ktot / (4.0 * params.kappa_ext);
}

double ils_amplitude_from_power(double p_s_watts,
                                const ResonatorParams& params) {
    params.validate();
    if (!(p_s_watts >= 0.0))
        throw std::invalid_argument("ILS power must be >= 0");
    return std::sqrt(p_s_watts / (kHBar * params.omega_s));
}

double ils_amplitude_for_photon_number(double n_p,
                                       const ResonatorParams& params) {
    params.validate();
    if (!(n_p >= 0.0)) throw std::invalid_argument("N_p must be >= 0");
    return 0.5 * params.kappa_tot() * std::sqrt(n_p / params.kappa_ext);
}

double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

double watts_to_dbm(double watts) {
    if (!(watts > 0.0))
        throw std::domain_error("power must be > 0 to express in dBm");
    return 10.0 * std::log10(watts / 1e-3);
}

double pump_ratio_from_powers(double p_p_watts, double p_th_watts) {
    if (!(p_th_watts > 0.0))
        throw std::domain_error("threshold power must be > 0");
    if (!(p_p_watts >= 0.0))
        throw std::invalid_argument("pump power must be >= 0");
    return p_p_watts / p_th_watts;
}

}  // namespace jpo
