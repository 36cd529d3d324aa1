#include "jpo/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace jpo {

namespace {

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
    double hi = v[v.size() / 2];
    if (v.size() % 2 == 1) return hi;
    std::nth_element(v.begin(), v.begin() + v.size() / 2 - 1, v.end());
    return 0.5 * (hi + v[v.size() / 2 - 1]);
}

// Continued-fraction evaluation of the regularized incomplete beta
// function, after Numerical Recipes.
double betacf(double a, double b, double x) {
    const int kMaxIter = 300;
    const double kEps = 3e-14, kFpMin = 1e-300;
    double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0, d = 1.0 - qab * x / qap;
    if (std::abs(d) < kFpMin) d = kFpMin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kFpMin) d = kFpMin;
        c = 1.0 + aa / c;
        if (std::abs(c) < kFpMin) c = kFpMin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

double inc_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double bt = std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                         a * std::log(x) + b * std::log1p(-x));
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * betacf(a, b, x) / a;
    return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

double f_cdf(double x, double d1, double d2) {
    if (x <= 0.0) return 0.0;
    return inc_beta(d1 / 2.0, d2 / 2.0, d1 * x / (d1 * x + d2));
}

double f_quantile(double p, double d1, double d2) {
    double lo = 0.0, hi = 1.0;
    while (f_cdf(hi, d1, d2) < p && hi < 1e12) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (f_cdf(mid, d1, d2) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

struct LogData {
    std::vector<double> f;
    std::vector<double> logd;
};

// Sum of squared residuals of the Lorentzian model in log space.
double lorentz_ssr(const LogData& d, double p, double fc, double w) {
    double ssr = 0.0;
    for (std::size_t i = 0; i < d.f.size(); ++i) {
        double u = d.f[i] / fc;
        double m = p / (1.0 + u * u) + w;
        double r = std::log(m) - d.logd[i];
        ssr += r * r;
    }
    return ssr;
}

struct LmResult {
    double p, fc, w, ssr;
    bool converged;
};

// Damped Gauss-Newton on theta = (ln p, ln fc, ln w).
LmResult lorentz_lm(const LogData& d, double p0, double fc0, double w0,
                    int max_iter) {
    double lp = std::log(p0), lfc = std::log(fc0),
           lw = std::log(std::max(w0, 1e-300));
    double lambda = 1e-3;
    double ssr = lorentz_ssr(d, std::exp(lp), std::exp(lfc), std::exp(lw));
    bool converged = false;
    for (int it = 0; it < max_iter; ++it) {
        const double p = std::exp(lp), fc = std::exp(lfc), w = std::exp(lw);
        // Normal equations J^T J and J^T r.
        double jtj[3][3] = {{0}}, jtr[3] = {0};
        for (std::size_t i = 0; i < d.f.size(); ++i) {
            double u = (d.f[i] / fc) * (d.f[i] / fc);
            double L = 1.0 / (1.0 + u);
            double m = p * L + w;
            double r = std::log(m) - d.logd[i];
            double j[3] = {p * L / m, 2.0 * p * u * L * L / m, w / m};
            for (int a = 0; a < 3; ++a) {
                jtr[a] += j[a] * r;
                for (int b = 0; b < 3; ++b) jtj[a][b] += j[a] * j[b];
            }
        }
        // Solve (J^T J + lambda diag) delta = -J^T r by Cramer's rule.
        double A[3][3];
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b)
                A[a][b] = jtj[a][b] + (a == b ? lambda * (jtj[a][a] + 1e-12) : 0.0);
        double det = A[0][0] * (A[1][1] * A[2][2] - A[1][2] * A[2][1]) -
                     A[0][1] * (A[1][0] * A[2][2] - A[1][2] * A[2][0]) +
                     A[0][2] * (A[1][0] * A[2][1] - A[1][1] * A[2][0]);
        if (std::abs(det) < 1e-300) {
            lambda *= 10.0;
            if (lambda > 1e12) break;
            continue;
        }
        auto solve = [&](int col) {
            double B[3][3];
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b)
                    B[a][b] = (b == col) ? -jtr[a] : A[a][b];
            return (B[0][0] * (B[1][1] * B[2][2] - B[1][2] * B[2][1]) -
                    B[0][1] * (B[1][0] * B[2][2] - B[1][2] * B[2][0]) +
                    B[0][2] * (B[1][0] * B[2][1] - B[1][1] * B[2][0])) /
                   det;
        };
        double dlp = solve(0), dlfc = solve(1), dlw = solve(2);
        // Bound the step to keep exp() sane.
        double step = std::max({std::abs(dlp), std::abs(dlfc), std::abs(dlw)});
        if (step > 5.0) {
            dlp *= 5.0 / step;
            dlfc *= 5.0 / step;
            dlw *= 5.0 / step;
        }
        double nlp = lp + dlp, nlfc = lfc + dlfc,
               nlw = std::max(lw + dlw, -690.0);
        double nssr =
            lorentz_ssr(d, std::exp(nlp), std::exp(nlfc), std::exp(nlw));
        if (nssr < ssr) {
            if (ssr - nssr < 1e-12 * (1.0 + ssr)) {
                lp = nlp; lfc = nlfc; lw = nlw; ssr = nssr;
                converged = true;
                break;
            }
            lp = nlp; lfc = nlfc; lw = nlw; ssr = nssr;
            lambda = std::max(lambda * 0.3, 1e-12);
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) { converged = true; break; }
        }
    }
    return {std::exp(lp), std::exp(lfc), std::exp(lw), ssr, converged};
}

}  // namespace

LorentzianFit fit_lorentzian(const std::vector<double>& freqs,
                             const std::vector<double>& psd,
                             const FitMask& mask, const FitOptions& opts) {
    if (freqs.size() != psd.size())
        throw std::invalid_argument("frequency/psd length mismatch");
    LogData d;
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        if (freqs[i] <= 0.0) continue;  // DC excluded
        if (psd[i] <= 0.0) continue;
        if (mask.excluded(freqs[i])) continue;
        d.f.push_back(freqs[i]);
        d.logd.push_back(std::log(psd[i]));
    }
    if (d.f.size() < 10)
        throw std::invalid_argument("need at least 10 usable bins");
    double fmin = *std::min_element(d.f.begin(), d.f.end());
    double fmax = *std::max_element(d.f.begin(), d.f.end());
    if (fmax < 10.0 * fmin)
        throw std::invalid_argument("usable band must span at least a decade");

    // Data-driven initialization: plateau from the low band, floor from the
    // high band, corner at the half-power crossing.
    std::vector<double> low, high;
    for (std::size_t i = 0; i < d.f.size(); ++i) {
        if (d.f[i] <= fmin * 3.0) low.push_back(std::exp(d.logd[i]));
        if (d.f[i] >= fmax / 3.0) high.push_back(std::exp(d.logd[i]));
    }
    double floor0 = median(high);
    double plateau0 = std::max(median(low) - floor0, floor0 * 1e-3 + 1e-300);
    double corner0 = std::sqrt(fmin * fmax);
    for (std::size_t i = 0; i < d.f.size(); ++i) {
        if (std::exp(d.logd[i]) < floor0 + 0.5 * plateau0) {
            corner0 = std::max(d.f[i], fmin * 1.5);
            break;
        }
    }

    LmResult best{plateau0, corner0, floor0, 1e300, false};
    bool any_converged = false;
    static constexpr double kJitter[][3] = {
        {1.0, 1.0, 1.0}, {2.0, 0.5, 1.0}, {0.5, 2.0, 1.0},
        {1.0, 0.25, 0.3}, {3.0, 4.0, 3.0}, {1.0, 1.0, 0.01},
    };
    const int n_tries = std::min<int>(opts.restarts + 1, 6);
    for (int t = 0; t < n_tries; ++t) {
        auto r = lorentz_lm(d, plateau0 * kJitter[t][0],
                            corner0 * kJitter[t][1],
                            std::max(floor0 * kJitter[t][2], 1e-300),
                            opts.max_iterations);
        any_converged = any_converged || r.converged;
        if (r.ssr < best.ssr) best = r;
    }
    if (!any_converged && best.ssr >= 1e300)
        throw std::runtime_error(
            "Lorentzian fit failed to converge from all restarts");

    LorentzianFit fit;
    fit.plateau = best.p;
    fit.corner_hz = best.fc;
    fit.white_floor = best.w;
    fit.residual = best.ssr;

    // Pure-white reference model: the best constant in log space.
    double c = 0.0;
    for (double v : d.logd) c += v;
    c /= static_cast<double>(d.logd.size());
    double ssr0 = 0.0;
    for (double v : d.logd) ssr0 += (v - c) * (v - c);

    const auto n = static_cast<double>(d.f.size());
    const double dof = n - 3.0;
    if (dof > 0.0 && best.ssr > 0.0) {
        fit.f_statistic = ((ssr0 - best.ssr) / 2.0) / (best.ssr / dof);
        const double fcrit = f_quantile(opts.f_test_confidence, 2.0, dof);
        // A corner outside the observed band carries no plateau-corner
        // signature; such a fit is not distinguishable from white noise
        // with curvature and is rejected.
        const bool corner_in_band = best.fc >= fmin && best.fc <= fmax;
        fit.accepted = fit.f_statistic > fcrit && corner_in_band &&
                       fit.plateau > 0.0;
    }
    return fit;
}

PowerLawFit fit_powerlaw(const std::vector<double>& freqs,
                         const std::vector<double>& psd,
                         std::pair<double, double> band) {
    if (freqs.size() != psd.size())
        throw std::invalid_argument("frequency/psd length mismatch");
    if (!(band.first < band.second))
        throw std::invalid_argument("band must satisfy f_lo < f_hi");
    std::vector<double> lf, ls;
    for (std::size_t i = 0; i < freqs.size(); ++i) {
        if (freqs[i] < band.first || freqs[i] > band.second) continue;
        if (freqs[i] <= 0.0 || psd[i] <= 0.0) continue;
        lf.push_back(std::log(freqs[i]));
        ls.push_back(std::log(psd[i]));
    }
    if (lf.size() < 8)
        throw std::invalid_argument("fewer than 8 bins in the fit band");
    const auto n = static_cast<double>(lf.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lf.size(); ++i) {
        sx += lf[i];
        sy += ls[i];
        sxx += lf[i] * lf[i];
        sxy += lf[i] * ls[i];
    }
    const double denom = n * sxx - sx * sx;
    PowerLawFit fit;
    fit.exponent = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - fit.exponent * sx) / n;
    fit.amplitude = std::exp(intercept);
    fit.band = band;
    for (std::size_t i = 0; i < lf.size(); ++i) {
        double r = ls[i] - (intercept + fit.exponent * lf[i]);
        fit.residual += r * r;
    }
    return fit;
}

RateConsistency rate_consistency(const SwitchingStats& stats,
                                 const LorentzianFit& fit, double tolerance) {
    if (!fit.accepted)
        throw std::invalid_argument(
            "rate_consistency requires an accepted Lorentzian fit");
    if (stats.switch_count < 50)
        throw std::invalid_argument(
            "rate_consistency requires at least 50 switching events");
    RateConsistency rc;
    rc.frequency_domain_rate = M_PI * fit.corner_hz;
    rc.time_domain_rate = stats.switching_rate;
    rc.relative_discrepancy =
        std::abs(rc.frequency_domain_rate - rc.time_domain_rate) /
        rc.frequency_domain_rate;
    const double occ_max = std::max(stats.occupation[0], stats.occupation[1]);
    if (occ_max > 0.75) {
        rc.asymmetric_flag = true;
        rc.note =
            "occupation is strongly asymmetric; the symmetric-RTN relation "
            "rate = pi * corner does not apply";
    }
    rc.pass = !rc.asymmetric_flag && rc.relative_discrepancy <= tolerance;
    return rc;
}

}  // namespace jpo
