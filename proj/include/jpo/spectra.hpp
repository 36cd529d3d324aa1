// Welch auto/cross spectral estimation, the spectral-domain noise covariance
// matrix and its per-bin rotation diagonalization into phase and amplitude
// noise densities.
#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "jpo/dynamics.hpp"

namespace jpo {

enum class WelchWindow { hann, rectangular, blackman };
enum class WelchDetrend { mean, none };

struct WelchConfig {
    std::size_t segment_length = 1 << 16;  // power of two, >= 8
    double overlap_fraction = 0.5;         // in [0, 1)
    WelchWindow window = WelchWindow::hann;
    WelchDetrend detrend = WelchDetrend::mean;

    void validate() const;
};

struct CrossSpectrum {
    std::vector<double> frequencies;
    std::vector<std::complex<double>> values;
    std::size_t segment_count = 0;
    bool low_average_warning = false;  // fewer than 2 segments averaged
};

struct NoiseSpectra {
    std::vector<double> frequencies;
    std::vector<double> s_ii;
    std::vector<double> s_qq;
    std::vector<std::complex<double>> s_iq;
    std::vector<double> s_aa;            // phase quadrature, set by diagonalize
    std::vector<double> s_bb;            // amplitude quadrature
    std::vector<double> rotation_angle;  // per-bin angle of Re S eigenbasis
    std::array<double, 2> mean_field{0.0, 0.0};  // (I mean, Q mean)
    std::size_t segment_count = 0;
    bool low_average_warning = false;
};

struct Fluctuations {
    std::vector<double> delta_i;
    std::vector<double> delta_q;
    std::array<double, 2> mean_field{0.0, 0.0};
};

// Per-channel demeaning over the full record.
Fluctuations fluctuations(const QuadratureTrace& trace);

// Windowed, overlapped, averaged one-sided cross spectral density
// S_xy(f) = <X(f) conj(Y(f))>, normalized so a white process of variance
// sigma^2 has level 2 sigma^2 / fs away from DC and Nyquist.
CrossSpectrum welch_csd(const std::vector<double>& x,
                        const std::vector<double>& y, double fs,
                        const WelchConfig& cfg);

// S_II, S_QQ, S_IQ of the demeaned trace; s_aa/s_bb left empty.
NoiseSpectra noise_covariance(const QuadratureTrace& trace,
                              const WelchConfig& cfg);

// Diagonalizes Re S(nu) per bin by an ordinary rotation. The eigenvalue
// whose eigenvector lies closer to the phase axis becomes s_aa, the other
// s_bb. The phase axis defaults to the direction perpendicular to the mean
// field (conventional homodyne split); callers may override it with an
// explicit angle, which is required when the mean field vanishes or when
// the fluctuation of interest lies along the mean field (a pi phase flip
// moves the field through the origin, i.e. parallel to it).
NoiseSpectra diagonalize(NoiseSpectra spectra,
                         std::optional<double> phase_axis_angle = {});

struct PhaseNoisePsd {
    std::vector<double> frequencies;
    std::vector<double> s_aa;
};

// fluctuations -> noise_covariance -> diagonalize, returning the phase
// quadrature density.
PhaseNoisePsd phase_noise_psd(const QuadratureTrace& trace,
                              const WelchConfig& cfg,
                              std::optional<double> phase_axis_angle = {});

}  // namespace jpo
