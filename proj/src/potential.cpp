#include "jpo/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace jpo {

namespace {

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "non-finite value for " << name;
        throw std::invalid_argument(os.str());
    }
}

}  // namespace

void ResonatorParams::validate() const {
    require_finite(kappa_ext, "kappa_ext");
    require_finite(kappa_int, "kappa_int");
    require_finite(omega_s, "omega_s");
    require_finite(gamma, "gamma");
    if (kappa_ext <= 0.0)
        throw std::invalid_argument("kappa_ext must be > 0");
    if (kappa_int < 0.0) throw std::invalid_argument("kappa_int must be >= 0");
    if (omega_s <= 0.0) throw std::invalid_argument("omega_s must be > 0");
    if (gamma >= 0.0)
        throw std::invalid_argument(
            "gamma must be < 0 for a bounded-below double well");
}

void DriveConfig::validate() const {
    require_finite(pump_ratio, "pump_ratio");
    require_finite(ils_amplitude, "ils_amplitude");
    require_finite(ils_phase, "ils_phase");
    if (pump_ratio < 0.0)
        throw std::invalid_argument("pump_ratio must be >= 0");
    if (ils_amplitude < 0.0)
        throw std::invalid_argument("ils_amplitude must be >= 0");
}

double potential_value(const ResonatorParams& params, const DriveConfig& drive,
                       const PhasePoint& q) {
    params.validate();
    drive.validate();
    require_finite(q.qx, "q.qx");
    require_finite(q.qy, "q.qy");
    const double kappa = params.kappa_tot();
    const double pump = (kappa / 4.0) * std::sqrt(drive.pump_ratio);
    const double r2 = q.qx * q.qx + q.qy * q.qy;
    const double ils = std::sqrt(params.kappa_ext) * drive.ils_amplitude;
    return pump * (q.qy * q.qy - q.qx * q.qx) - 3.0 * params.gamma * r2 * r2 +
           ils * (q.qy * std::cos(drive.ils_phase) -
                  q.qx * std::sin(drive.ils_phase));
}

std::array<double, 2> potential_gradient(const ResonatorParams& params,
                                         const DriveConfig& drive,
                                         const PhasePoint& q) {
    params.validate();
    drive.validate();
    require_finite(q.qx, "q.qx");
    require_finite(q.qy, "q.qy");
    const double kappa = params.kappa_tot();
    const double pump = (kappa / 2.0) * std::sqrt(drive.pump_ratio);
    const double r2 = q.qx * q.qx + q.qy * q.qy;
    const double ils = std::sqrt(params.kappa_ext) * drive.ils_amplitude;
    return {
        -pump * q.qx - 12.0 * params.gamma * r2 * q.qx -
            ils * std::sin(drive.ils_phase),
        pump * q.qy - 12.0 * params.gamma * r2 * q.qy +
            ils * std::cos(drive.ils_phase),
    };
}

std::array<double, 3> potential_hessian(const ResonatorParams& params,
                                        const DriveConfig& drive,
                                        const PhasePoint& q) {
    const double kappa = params.kappa_tot();
    const double pump = (kappa / 2.0) * std::sqrt(drive.pump_ratio);
    const double g = params.gamma;
    const double uxx =
        -pump - 12.0 * g * (3.0 * q.qx * q.qx + q.qy * q.qy);
    const double uyy = pump - 12.0 * g * (q.qx * q.qx + 3.0 * q.qy * q.qy);
    const double uxy = -24.0 * g * q.qx * q.qy;
    return {uxx, uxy, uyy};
}

double well_location_no_ils(const ResonatorParams& params,
                            const DriveConfig& drive) {
    params.validate();
    drive.validate();
    return std::sqrt(params.kappa_tot() * std::sqrt(drive.pump_ratio) /
                     (24.0 * std::abs(params.gamma)));
}

double barrier_no_ils(const ResonatorParams& params,
                      const DriveConfig& drive) {
    params.validate();
    drive.validate();
    const double kappa = params.kappa_tot();
    return kappa * kappa * drive.pump_ratio /
           (192.0 * std::abs(params.gamma));
}

namespace {

struct NewtonResult {
    PhasePoint point;
    bool converged = false;
};

NewtonResult damped_newton(const ResonatorParams& params,
                           const DriveConfig& drive, PhasePoint q,
                           const SearchConfig& search, double scale) {
    const double tol = search.gradient_tolerance * std::max(scale, 1.0);
    for (int it = 0; it < search.max_iterations; ++it) {
        auto g = potential_gradient(params, drive, q);
        double gnorm = std::hypot(g[0], g[1]);
        if (gnorm < tol) return {q, true};
        auto h = potential_hessian(params, drive, q);
        double det = h[0] * h[2] - h[1] * h[1];
        double dx, dy;
        if (std::abs(det) > 1e-14 * (std::abs(h[0]) + std::abs(h[2]) + 1.0)) {
            dx = -(h[2] * g[0] - h[1] * g[1]) / det;
            dy = -(h[0] * g[1] - h[1] * g[0]) / det;
        } else {
            // Degenerate Hessian: fall back to a small gradient step.
            dx = -g[0] / (gnorm / scale + 1.0);
            dy = -g[1] / (gnorm / scale + 1.0);
        }
        // Trust-region cap keeps Newton from vaulting between basins.
        double step = std::hypot(dx, dy);
        double cap = 0.5 * scale;
        if (step > cap) {
            dx *= cap / step;
            dy *= cap / step;
        }
        q.qx += dx;
        q.qy += dy;
        if (!std::isfinite(q.qx) || !std::isfinite(q.qy)) return {q, false};
    }
    auto g = potential_gradient(params, drive, q);
    return {q, std::hypot(g[0], g[1]) < tol};
}

}  // namespace

std::vector<StationaryPoint> find_stationary_points(
    const ResonatorParams& params, const DriveConfig& drive,
    const SearchConfig& search) {
    params.validate();
    drive.validate();
    const double qs = well_location_no_ils(params, drive);
    const double scale = std::max(qs, 1e-6);

    std::vector<PhasePoint> starts = {
        {0.0, 0.0},   {qs, 0.0},  {-qs, 0.0}, {0.0, qs},   {0.0, -qs},
        {qs, qs},     {qs, -qs},  {-qs, qs},  {-qs, -qs},
    };

    std::vector<StationaryPoint> found;
    bool any_converged = false;
    const double dedup = search.dedup_radius_factor * scale;
    for (const auto& s : starts) {
        auto res = damped_newton(params, drive, s, search, scale);
        if (!res.converged) continue;
        any_converged = true;
        bool duplicate = false;
        for (const auto& p : found) {
            if (std::hypot(p.location.qx - res.point.qx,
                           p.location.qy - res.point.qy) < std::max(dedup, 1e-9))
                duplicate = true;
        }
        if (duplicate) continue;

        auto h = potential_hessian(params, drive, res.point);
        double mean = 0.5 * (h[0] + h[2]);
        double disc = std::sqrt(0.25 * (h[0] - h[2]) * (h[0] - h[2]) +
                                h[1] * h[1]);
        double l1 = mean - disc, l2 = mean + disc;
        StationaryKind kind;
        if (l1 > 0.0 && l2 > 0.0)
            kind = StationaryKind::minimum;
        else if (l1 < 0.0 && l2 < 0.0)
            kind = StationaryKind::maximum;
        else
            kind = StationaryKind::saddle;
        found.push_back({res.point, potential_value(params, drive, res.point),
                         kind, {l1, l2}});
    }
    if (!any_converged)
        throw std::runtime_error(
            "stationary-point search failed to converge from all starts "
            "(max_iterations=" +
            std::to_string(search.max_iterations) + ")");
    std::sort(found.begin(), found.end(),
              [](const StationaryPoint& a, const StationaryPoint& b) {
                  return a.energy < b.energy;
              });
    return found;
}

BarrierReport barrier_and_asymmetry(const ResonatorParams& params,
                                    const DriveConfig& drive,
                                    const SearchConfig& search) {
    auto points = find_stationary_points(params, drive, search);
    std::vector<const StationaryPoint*> minima;
    const StationaryPoint* saddle = nullptr;
    for (const auto& p : points) {
        if (p.kind == StationaryKind::minimum) minima.push_back(&p);
        if (p.kind == StationaryKind::saddle &&
            (saddle == nullptr || p.energy < saddle->energy))
            saddle = &p;
    }
    if (minima.size() != 2 || saddle == nullptr)
        throw std::domain_error(
            "potential is not bistable (ILS beyond the bistable range): "
            "found " +
            std::to_string(minima.size()) + " minima");
    const StationaryPoint* neg = minima[0];
    const StationaryPoint* pos = minima[1];
    if (neg->location.qx > pos->location.qx) std::swap(neg, pos);
    BarrierReport report;
    report.barrier_from_each_well = {saddle->energy - neg->energy,
                                     saddle->energy - pos->energy};
    report.well_energy_splitting = pos->energy - neg->energy;
    return report;
}

std::vector<std::pair<double, double>> cross_section(
    const ResonatorParams& params, const DriveConfig& drive,
    const std::vector<double>& grid) {
    if (grid.empty()) throw std::invalid_argument("empty cross-section grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (grid[i] <= grid[i - 1])
            throw std::invalid_argument("cross-section grid must increase");
    std::vector<std::pair<double, double>> curve;
    curve.reserve(grid.size());
    for (double qx : grid)
        curve.emplace_back(qx, potential_value(params, drive, {qx, 0.0}));
    return curve;
}

}  // namespace jpo
