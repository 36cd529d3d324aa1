// Lorentzian and power-law fits to noise PSDs, plus the time-domain /
// frequency-domain switching-rate cross check.
#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jpo/dynamics.hpp"

namespace jpo {

struct FitMask {
    // Frequency intervals excluded from the fit (spur notches).
    std::vector<std::pair<double, double>> notches;
    bool excluded(double f) const {
        for (const auto& [lo, hi] : notches)
            if (f >= lo && f <= hi) return true;
        return false;
    }
};

struct LorentzianFit {
    double plateau = 0.0;      // density at f << corner
    double corner_hz = 0.0;    // half-power frequency
    double white_floor = 0.0;  // additive density floor
    double residual = 0.0;     // sum of squared log residuals
    bool accepted = false;     // F-test vs pure white, corner inside band
    double f_statistic = 0.0;
};

struct PowerLawFit {
    double exponent = 0.0;
    double amplitude = 0.0;  // density at 1 Hz
    std::pair<double, double> band{0.0, 0.0};
    double residual = 0.0;
};

struct RateConsistency {
    double frequency_domain_rate = 0.0;  // pi * corner_hz
    double time_domain_rate = 0.0;       // measured switching rate
    double relative_discrepancy = 0.0;
    bool pass = false;
    bool asymmetric_flag = false;  // symmetric-RTN formula inapplicable
    std::string note;
};

struct FitOptions {
    double f_test_confidence = 0.95;
    int restarts = 5;
    int max_iterations = 200;
};

// Least squares in log-density space of plateau / (1 + (f/corner)^2) +
// white_floor, with data-driven initialization and deterministic jittered
// restarts. Acceptance requires the F-test improvement over a pure-white
// model at the configured confidence and the fitted corner inside the
// usable band (a corner beyond the data is indistinguishable from white).
// Throws std::invalid_argument for fewer than 10 usable bins or a band
// narrower than one decade.
LorentzianFit fit_lorentzian(const std::vector<double>& freqs,
                             const std::vector<double>& psd,
                             const FitMask& mask = {},
                             const FitOptions& opts = {});

// Linear regression of log S on log f over [band.first, band.second].
// Throws std::invalid_argument when fewer than 8 bins fall in the band.
PowerLawFit fit_powerlaw(const std::vector<double>& freqs,
                         const std::vector<double>& psd,
                         std::pair<double, double> band);

// Compares pi * corner_hz against the measured switching rate of a
// symmetric telegraph process. Requires an accepted fit and >= 50 switches.
RateConsistency rate_consistency(const SwitchingStats& stats,
                                 const LorentzianFit& fit,
                                 double tolerance = 0.2);

}  // namespace jpo
