#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "jpo/potential.hpp"

using namespace jpo;

namespace {

// Canonical scaled configuration: kappa = 4, pump at threshold ratio 1,
// gamma = -1/12. Wells sit at (+-sqrt(2), 0) with U = -1, barrier 1.
ResonatorParams canonical() { return {}; }

DriveConfig tilt(double amplitude, double phase = -M_PI / 2.0) {
    DriveConfig d;
    d.ils_amplitude = amplitude;
    d.ils_phase = phase;
    return d;
}

}  // namespace

TEST_CASE("closed-form well and barrier of the symmetric potential") {
    auto p = canonical();
    DriveConfig d;
    CHECK(well_location_no_ils(p, d) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(barrier_no_ils(p, d) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(potential_value(p, d, {std::sqrt(2.0), 0.0}) ==
          doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(potential_value(p, d, {0.0, 0.0}) == doctest::Approx(0.0));
    // Hand-evaluated slope at (1, 0): -(kappa/2) q - 12 gamma q^3 = -2 + 1.
    CHECK(potential_gradient(p, d, {1.0, 0.0})[0] ==
          doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("gradient and hessian match central finite differences") {
    auto p = canonical();
    p.kappa_ext = 3.0;
    p.kappa_int = 0.5;
    p.gamma = -0.21;
    auto d = tilt(0.37, 0.9);
    d.pump_ratio = 1.8;
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> u(-2.5, 2.5);
    const double h = 1e-5;
    for (int k = 0; k < 100; ++k) {
        PhasePoint q{u(rng), u(rng)};
        auto g = potential_gradient(p, d, q);
        double gx = (potential_value(p, d, {q.qx + h, q.qy}) -
                     potential_value(p, d, {q.qx - h, q.qy})) /
                    (2 * h);
        double gy = (potential_value(p, d, {q.qx, q.qy + h}) -
                     potential_value(p, d, {q.qx, q.qy - h})) /
                    (2 * h);
        CHECK(g[0] == doctest::Approx(gx).epsilon(1e-6));
        CHECK(g[1] == doctest::Approx(gy).epsilon(1e-6));
        auto H = potential_hessian(p, d, q);
        double hxx = (potential_gradient(p, d, {q.qx + h, q.qy})[0] -
                      potential_gradient(p, d, {q.qx - h, q.qy})[0]) /
                     (2 * h);
        double hxy = (potential_gradient(p, d, {q.qx, q.qy + h})[0] -
                      potential_gradient(p, d, {q.qx, q.qy - h})[0]) /
                     (2 * h);
        double hyy = (potential_gradient(p, d, {q.qx, q.qy + h})[1] -
                      potential_gradient(p, d, {q.qx, q.qy - h})[1]) /
                     (2 * h);
        CHECK(H[0] == doctest::Approx(hxx).epsilon(1e-5));
        CHECK(H[1] == doctest::Approx(hxy).epsilon(1e-5).scale(1.0));
        CHECK(H[2] == doctest::Approx(hyy).epsilon(1e-5));
    }
}

TEST_CASE("stationary points of the symmetric potential") {
    auto p = canonical();
    DriveConfig d;
    auto pts = find_stationary_points(p, d);
    REQUIRE(pts.size() == 3);
    // Sorted by energy: the two degenerate minima first.
    CHECK(pts[0].kind == StationaryKind::minimum);
    CHECK(pts[1].kind == StationaryKind::minimum);
    CHECK(pts[2].kind == StationaryKind::saddle);
    CHECK(std::abs(pts[0].location.qx) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
    CHECK(pts[0].location.qy == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
    CHECK(pts[0].energy == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(pts[2].energy == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
    // No-ILS wells are isotropic to the quadratic order: both curvatures
    // equal kappa sqrt(r).
    CHECK(pts[0].hessian_eigenvalues[0] == doctest::Approx(4.0).epsilon(1e-8));
    CHECK(pts[0].hessian_eigenvalues[1] == doctest::Approx(4.0).epsilon(1e-8));
}

TEST_CASE("grid-minimization oracle for a tilted potential") {
    auto p = canonical();
    auto d = tilt(0.15);  // modest tilt, still bistable
    // Brute-force minimum on a fine grid near each well.
    auto refine = [&](double x0) {
        double best = 1e300, bx = 0, by = 0;
        for (double x = x0 - 0.4; x <= x0 + 0.4; x += 1e-3)
            for (double y = -0.2; y <= 0.2; y += 1e-3) {
                double u = potential_value(p, d, {x, y});
                if (u < best) { best = u; bx = x; by = y; }
            }
        return std::array<double, 3>{bx, by, best};
    };
    auto pts = find_stationary_points(p, d);
    int minima = 0;
    for (const auto& s : pts) {
        if (s.kind != StationaryKind::minimum) continue;
        ++minima;
        auto ref = refine(s.location.qx > 0 ? std::sqrt(2.0) : -std::sqrt(2.0));
        CHECK(s.location.qx == doctest::Approx(ref[0]).epsilon(5e-3));
        CHECK(s.location.qy == doctest::Approx(ref[1]).scale(1.0).epsilon(5e-3));
        CHECK(s.energy <= ref[2] + 1e-9);
    }
    CHECK(minima == 2);
}

TEST_CASE("barrier report orientation and monostable rejection") {
    auto p = canonical();
    // theta_s = -pi/2 adds +c*q_x to U, so the q_x < 0 well deepens.
    auto rep = barrier_and_asymmetry(p, tilt(0.15));
    CHECK(rep.well_energy_splitting > 0.0);  // U(+well) - U(-well)
    CHECK(rep.barrier_from_each_well[0] > rep.barrier_from_each_well[1]);
    // Beyond the critical tilt the shallow well disappears.
    CHECK_THROWS_AS(barrier_and_asymmetry(p, tilt(1.6)),
                    std::domain_error);
    // Just below: still bistable.
    CHECK_NOTHROW(barrier_and_asymmetry(p, tilt(0.5)));
}

TEST_CASE("parameter validation") {
    ResonatorParams p;
    p.gamma = 0.1;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = canonical();
    p.kappa_ext = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = canonical();
    p.kappa_int = -1.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    DriveConfig d;
    d.pump_ratio = -0.1;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
    d = DriveConfig{};
    d.ils_amplitude = -1.0;
    CHECK_THROWS_AS(d.validate(), std::invalid_argument);
}

TEST_CASE("cross_section demands a strictly increasing grid") {
    auto p = canonical();
    DriveConfig d;
    CHECK_THROWS_AS(cross_section(p, d, {0.0, 1.0, 0.5}),
                    std::invalid_argument);
    auto curve = cross_section(p, d, {-1.0, 0.0, 1.0});
    REQUIRE(curve.size() == 3);
    CHECK(curve[1].second == doctest::Approx(0.0));
    CHECK(curve[0].second == doctest::Approx(curve[2].second).epsilon(1e-12));
}
