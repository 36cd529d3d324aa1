#include "jpo/spectra.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numeric>
#include <stdexcept>

namespace jpo {

void WelchConfig::validate() const {
    if (segment_length < 8)
        throw std::invalid_argument("segment_length must be >= 8");
    if ((segment_length & (segment_length - 1)) != 0)
        throw std::invalid_argument("segment_length must be a power of two");
    if (!(overlap_fraction >= 0.0 && overlap_fraction < 1.0))
        throw std::invalid_argument("overlap_fraction must be in [0, 1)");
}

Fluctuations fluctuations(const QuadratureTrace& trace) {
    if (trace.size() < 2)
        throw std::invalid_argument("trace must hold at least 2 samples");
    const auto n = trace.size();
    Fluctuations f;
    double mi = std::accumulate(trace.i_samples.begin(), trace.i_samples.end(),
                                0.0) /
                static_cast<double>(n);
    double mq = std::accumulate(trace.q_samples.begin(), trace.q_samples.end(),
                                0.0) /
                static_cast<double>(n);
    f.mean_field = {mi, mq};
    f.delta_i.resize(n);
    f.delta_q.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        f.delta_i[k] = trace.i_samples[k] - mi;
        f.delta_q[k] = trace.q_samples[k] - mq;
    }
    return f;
}

namespace {

std::vector<double> make_window(WelchWindow kind, std::size_t n) {
    std::vector<double> w(n, 1.0);
    const double two_pi = 2.0 * M_PI;
    switch (kind) {
        case WelchWindow::rectangular:
            break;
        case WelchWindow::hann:
            for (std::size_t i = 0; i < n; ++i)
                w[i] = 0.5 * (1.0 - std::cos(two_pi * static_cast<double>(i) /
                                             static_cast<double>(n)));
            break;
        case WelchWindow::blackman:
            for (std::size_t i = 0; i < n; ++i) {
                double x = two_pi * static_cast<double>(i) /
                           static_cast<double>(n);
                w[i] = 0.42 - 0.5 * std::cos(x) + 0.08 * std::cos(2.0 * x);
            }
            break;
    }
    return w;
}

// FFTW planning is not thread safe; execution of independent plans is.
std::mutex g_fftw_plan_mutex;

class RealFft {
  public:
    explicit RealFft(std::size_t n) : n_(n) {
        in_ = fftw_alloc_real(n);
        out_ = fftw_alloc_complex(n / 2 + 1);
        std::lock_guard<std::mutex> lock(g_fftw_plan_mutex);
        plan_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), in_, out_,
                                     FFTW_ESTIMATE);
    }
    ~RealFft() {
        std::lock_guard<std::mutex> lock(g_fftw_plan_mutex);
        fftw_destroy_plan(plan_);
        fftw_free(in_);
        fftw_free(out_);
    }
    RealFft(const RealFft&) = delete;
    RealFft& operator=(const RealFft&) = delete;

    // Windowed (and optionally demeaned) transform of x[offset .. offset+n).
    void transform(const std::vector<double>& x, std::size_t offset,
                   const std::vector<double>& window, bool demean,
                   std::vector<std::complex<double>>& spectrum) {
        double mean = 0.0;
        if (demean) {
            for (std::size_t i = 0; i < n_; ++i) mean += x[offset + i];
            mean /= static_cast<double>(n_);
        }
        for (std::size_t i = 0; i < n_; ++i)
            in_[i] = (x[offset + i] - mean) * window[i];
        fftw_execute(plan_);
        spectrum.resize(n_ / 2 + 1);
        for (std::size_t i = 0; i <= n_ / 2; ++i)
            spectrum[i] = {out_[i][0], out_[i][1]};
    }

  private:
    std::size_t n_;
    double* in_;
    fftw_complex* out_;
    fftw_plan plan_;
};

}  // namespace

CrossSpectrum welch_csd(const std::vector<double>& x,
                        const std::vector<double>& y, double fs,
                        const WelchConfig& cfg) {
    cfg.validate();
    if (x.size() != y.size())
        throw std::invalid_argument("channel lengths differ");
    if (!(fs > 0.0)) throw std::invalid_argument("fs must be > 0");
    const std::size_t seg = cfg.segment_length;
    if (seg > x.size())
        throw std::invalid_argument("segment longer than the series");

    const auto hop = std::max<std::size_t>(
        1, static_cast<std::size_t>(
               std::llround(static_cast<double>(seg) *
                            (1.0 - cfg.overlap_fraction))));
    const auto window = make_window(cfg.window, seg);
    const double wpow = std::inner_product(window.begin(), window.end(),
                                           window.begin(), 0.0);
    const bool demean = cfg.detrend == WelchDetrend::mean;
    const bool same = (&x == &y);

    RealFft fft(seg);
    std::vector<std::complex<double>> sx, sy;
    std::vector<std::complex<double>> acc(seg / 2 + 1, {0.0, 0.0});
    std::size_t n_seg = 0;
    for (std::size_t off = 0; off + seg <= x.size(); off += hop) {
        fft.transform(x, off, window, demean, sx);
        if (same) {
            for (std::size_t i = 0; i < acc.size(); ++i)
                acc[i] += sx[i] * std::conj(sx[i]);
        } else {
            fft.transform(y, off, window, demean, sy);
            for (std::size_t i = 0; i < acc.size(); ++i)
                acc[i] += sx[i] * std::conj(sy[i]);
        }
        ++n_seg;
    }

    CrossSpectrum result;
    result.segment_count = n_seg;
    result.low_average_warning = n_seg < 2;
    const double norm = 1.0 / (fs * wpow * static_cast<double>(n_seg));
    result.frequencies.resize(acc.size());
    result.values.resize(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i) {
        result.frequencies[i] =
            static_cast<double>(i) * fs / static_cast<double>(seg);
        // One-sided density: double everything except DC and Nyquist.
        double fold = (i == 0 || i == seg / 2) ? 1.0 : 2.0;
        result.values[i] = acc[i] * (norm * fold);
    }
    return result;
}

NoiseSpectra noise_covariance(const QuadratureTrace& trace,
                              const WelchConfig& cfg) {
    auto f = fluctuations(trace);
    auto sii = welch_csd(f.delta_i, f.delta_i, trace.sample_rate, cfg);
    auto sqq = welch_csd(f.delta_q, f.delta_q, trace.sample_rate, cfg);
    auto siq = welch_csd(f.delta_i, f.delta_q, trace.sample_rate, cfg);

    NoiseSpectra s;
    s.frequencies = std::move(sii.frequencies);
    s.segment_count = sii.segment_count;
    s.low_average_warning = sii.low_average_warning;
    s.mean_field = f.mean_field;
    s.s_ii.resize(s.frequencies.size());
    s.s_qq.resize(s.frequencies.size());
    for (std::size_t i = 0; i < s.frequencies.size(); ++i) {
        s.s_ii[i] = sii.values[i].real();
        s.s_qq[i] = sqq.values[i].real();
    }
    s.s_iq = std::move(siq.values);
    return s;
}

NoiseSpectra diagonalize(NoiseSpectra spectra,
                         std::optional<double> phase_axis_angle) {
    if (spectra.s_ii.empty() || spectra.s_qq.empty() || spectra.s_iq.empty())
        throw std::invalid_argument("covariance spectra not populated");
    double phase_axis;
    if (phase_axis_angle) {
        phase_axis = *phase_axis_angle;
    } else {
        const double mi = spectra.mean_field[0];
        const double mq = spectra.mean_field[1];
        if (mi == 0.0 && mq == 0.0)
            throw std::domain_error(
                "mean field is zero; the phase/amplitude split is ambiguous "
                "-- supply an explicit phase reference angle");
        phase_axis = std::atan2(mq, mi) + M_PI / 2.0;
    }

    const std::size_t n = spectra.frequencies.size();
    spectra.s_aa.resize(n);
    spectra.s_bb.resize(n);
    spectra.rotation_angle.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = spectra.s_ii[i];
        const double b = spectra.s_qq[i];
        const double c = spectra.s_iq[i].real();  // rotation acts on Re S only
        const double phi = 0.5 * std::atan2(2.0 * c, a - b);
        spectra.rotation_angle[i] = phi;
        const double mean = 0.5 * (a + b);
        const double disc = std::sqrt(0.25 * (a - b) * (a - b) + c * c);
        // phi is the direction of the larger eigenvalue of Re S.
        const double lam_major = mean + disc;
        const double lam_minor = mean - disc;
        // Distance of the major axis from the phase axis, modulo pi.
        double d = std::remainder(phi - phase_axis, M_PI);
        if (std::abs(d) <= M_PI / 4.0) {
            spectra.s_aa[i] = lam_major;
            spectra.s_bb[i] = lam_minor;
        } else {
            spectra.s_aa[i] = lam_minor;
            spectra.s_bb[i] = lam_major;
        }
    }
    return spectra;
}

PhaseNoisePsd phase_noise_psd(const QuadratureTrace& trace,
                              const WelchConfig& cfg,
                              std::optional<double> phase_axis_angle) {
    auto s = diagonalize(noise_covariance(trace, cfg), phase_axis_angle);
    return {std::move(s.frequencies), std::move(s.s_aa)};
}

}  // namespace jpo
