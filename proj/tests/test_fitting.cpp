#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "jpo/fitting.hpp"

using namespace jpo;

namespace {

struct Synth {
    std::vector<double> f;
    std::vector<double> s;
};

// Log-spaced frequency grid with an exact Lorentzian-plus-floor model and
// optional multiplicative log-normal scatter.
Synth synth_lorentzian(double plateau, double corner, double floor_,
                       double scatter, unsigned seed) {
    Synth out;
    std::mt19937 rng(seed);
    std::normal_distribution<double> n(0.0, scatter);
    for (double f = 1e-4; f <= 0.5; f *= 1.06) {
        double s = plateau / (1.0 + (f / corner) * (f / corner)) + floor_;
        if (scatter > 0.0) s *= std::exp(n(rng));
        out.f.push_back(f);
        out.s.push_back(s);
    }
    return out;
}

}  // namespace

TEST_CASE("exact lorentzian is recovered") {
    auto d = synth_lorentzian(2500.0, 3e-3, 0.1, 0.0, 1);
    auto fit = fit_lorentzian(d.f, d.s);
    CHECK(fit.accepted);
    CHECK(fit.plateau == doctest::Approx(2500.0).epsilon(1e-4));
    CHECK(fit.corner_hz == doctest::Approx(3e-3).epsilon(1e-4));
    CHECK(fit.white_floor == doctest::Approx(0.1).epsilon(1e-3));
    CHECK(fit.residual < 1e-10);
}

TEST_CASE("noisy lorentzian is recovered within tolerance") {
    auto d = synth_lorentzian(2500.0, 3e-3, 0.1, 0.15, 2);
    auto fit = fit_lorentzian(d.f, d.s);
    CHECK(fit.accepted);
    CHECK(fit.plateau == doctest::Approx(2500.0).epsilon(0.10));
    CHECK(fit.corner_hz == doctest::Approx(3e-3).epsilon(0.10));
}

TEST_CASE("pure white data rejects the lorentzian model") {
    auto d = synth_lorentzian(0.0, 1.0, 0.2, 0.1, 3);
    auto fit = fit_lorentzian(d.f, d.s);
    CHECK(!fit.accepted);
}

TEST_CASE("corner beyond the band rejects the fit") {
    // Corner at 5 Hz while the data stop at 0.5 Hz: within the band the
    // model is indistinguishable from white, so acceptance must fail even
    // though the optimizer may report a formally better SSR.
    auto d = synth_lorentzian(1.0, 5.0, 0.0, 0.05, 4);
    auto fit = fit_lorentzian(d.f, d.s);
    CHECK(!fit.accepted);
}

TEST_CASE("notch mask excludes spur bins") {
    auto d = synth_lorentzian(2500.0, 3e-3, 0.1, 0.0, 5);
    // Corrupt a narrow band with a huge spur.
    for (std::size_t k = 0; k < d.f.size(); ++k)
        if (d.f[k] > 0.01 && d.f[k] < 0.02) d.s[k] *= 1e4;
    FitMask mask;
    mask.notches.push_back({0.01, 0.02});
    auto fit = fit_lorentzian(d.f, d.s, mask);
    CHECK(fit.accepted);
    CHECK(fit.plateau == doctest::Approx(2500.0).epsilon(1e-3));
    CHECK(fit.corner_hz == doctest::Approx(3e-3).epsilon(1e-3));
    // Without the notch the same data pull the fit away.
    auto bad = fit_lorentzian(d.f, d.s);
    CHECK(std::abs(bad.corner_hz - 3e-3) > std::abs(fit.corner_hz - 3e-3));
}

TEST_CASE("degenerate inputs throw") {
    std::vector<double> f{0.1, 0.2, 0.3}, s{1.0, 1.0, 1.0};
    CHECK_THROWS_AS(fit_lorentzian(f, s), std::invalid_argument);
    // 12 bins but only a factor-3 band: less than a decade.
    std::vector<double> f2, s2;
    for (double x = 0.1; x <= 0.3; x *= 1.1) {
        f2.push_back(x);
        s2.push_back(1.0);
    }
    CHECK_THROWS_AS(fit_lorentzian(f2, s2), std::invalid_argument);
}

TEST_CASE("power law regression is exact on synthetic data") {
    std::vector<double> f, s;
    for (double x = 1e-3; x <= 1.0; x *= 1.1) {
        f.push_back(x);
        s.push_back(7.5 * std::pow(x, -2.0));
    }
    auto fit = fit_powerlaw(f, s, {1e-3, 1.0});
    CHECK(fit.exponent == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(fit.amplitude == doctest::Approx(7.5).epsilon(1e-9));
    CHECK(fit.residual < 1e-18);
    CHECK_THROWS_AS(fit_powerlaw(f, s, {0.9, 1.0}), std::invalid_argument);
}

TEST_CASE("rate consistency cross check") {
    auto d = synth_lorentzian(2500.0, 3e-3, 0.1, 0.0, 6);
    auto fit = fit_lorentzian(d.f, d.s);
    REQUIRE(fit.accepted);
    const double rate = M_PI * fit.corner_hz;

    SwitchingStats stats;
    stats.switch_count = 200;
    stats.occupation = {0.5, 0.5};
    stats.switching_rate = rate * 1.05;  // within 20%
    auto rc = rate_consistency(stats, fit);
    CHECK(rc.pass);
    CHECK(!rc.asymmetric_flag);
    CHECK(rc.frequency_domain_rate == doctest::Approx(rate));

    stats.switching_rate = rate * 2.0;
    rc = rate_consistency(stats, fit);
    CHECK(!rc.pass);

    // Strong asymmetry invalidates the symmetric-RTN relation.
    stats.switching_rate = rate;
    stats.occupation = {0.9, 0.1};
    rc = rate_consistency(stats, fit);
    CHECK(rc.asymmetric_flag);

    // Preconditions: enough switches and an accepted fit.
    stats.occupation = {0.5, 0.5};
    stats.switch_count = 10;
    CHECK_THROWS_AS(rate_consistency(stats, fit), std::invalid_argument);
    LorentzianFit rejected;
    rejected.accepted = false;
    stats.switch_count = 200;
    CHECK_THROWS_AS(rate_consistency(stats, rejected), std::invalid_argument);
}
