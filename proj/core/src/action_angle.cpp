#include "spdlm/action_angle.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "spdlm/dynamics_quadratic.hpp"
#include "spdlm/elliptic.hpp"
#include "spdlm/errors.hpp"
#include "spdlm/io.hpp"
#include "spdlm/oracle.hpp"

namespace spdlm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

bool crosses_poles(const QuadraticFiberParams& q) {
    return q.j == 0.0 && q.h > 1.0;
}

std::pair<double, double> closed_periods(const QuadraticFiberParams& q) {
    const double c = q.time_scale;
    const double T = 4.0 * c * elliptic::ellint_K_kc(q.kc2);
    if (q.j == 0.0) {
        return {0.0, T};
    }
    const double S = -4.0 * q.j * c * elliptic::ellint_Pi_complete_kcn(q.n, q.one_minus_z_minus, q.kc2);
    return {S, T};
}

double third_kind(const QuadraticFiberParams& q, double gamma) {
    return elliptic::ellint_Pi_kcn(gamma, q.n, q.one_minus_z_minus, q.kc2);
}

QuadraticFiberParams regular_params(const PhasePoint& p) {
    const MomentumValue m = momentum_map(p, Potential::quadratic());
    return fiber_params(m.j, m.h);
}

// Azimuth with the pole convention of the two-case formulas.
double azimuth_with_pole_convention(const PhasePoint& p) {
    if (p.x == 0.0 && p.y == 0.0) {
        const double phi = std::atan2(p.v, p.u);
        return p.z > 0.0 ? phi + kPi : phi;
    }
    return std::atan2(p.y, p.x);
}

}  // namespace

double angle_difference(double a, double b) {
    return std::remainder(a - b, kTwoPi);
}

PeriodLattice period_generators(double j, double h) {
    switch (classify(j, h)) {
        case Stratum::EllipticBoundary:
            return {1, 0.0, 0.0, {{1.0, 0.0}}};
        case Stratum::FocusFocus:
            throw StratumError("period lattice is undefined at the focus-focus value (T diverges)");
        case Stratum::Outside:
            throw StratumError("outside momentum image");
        case Stratum::Regular:
            break;
    }
    const auto [S, T] = closed_periods(fiber_params(j, h));
    return {2, S, T, {{1.0, 0.0}, {S / kTwoPi, T / kTwoPi}}};
}

AlternativePeriods alternative_period_formulas(double j, double h) {
    const QuadraticFiberParams q = fiber_params(j, h);
    const double k = q.parameter;
    const double prefactor = std::pow(2.0, 0.25) * std::sqrt(k * k * k * q.ell);
    AlternativePeriods out;
    out.T_general = 4.0 * prefactor * elliptic::ellint_K(k);
    try {
        out.S_general = -4.0 * j * prefactor * elliptic::ellint_Pi_complete(k * q.ell / std::sqrt(2.0), k);
    } catch (const DomainError&) {
        out.S_general = std::nan("");
    }
    if (j == 0.0) {
        const double modulus = h < 1.0 ? std::sqrt(h) : 1.0 / std::sqrt(h);
        out.T_special = 4.0 * std::sqrt(2.0 * h) * elliptic::ellint_K(modulus);
    }
    return out;
}

PhasePoint section_point(double j, double h) {
    const double ell2 = 2.0 * h - j * j;
    if (ell2 < 0.0) {
        throw StratumError("outside momentum image");
    }
    return {1.0, 0.0, 0.0, 0.0, j, std::sqrt(ell2)};
}

double action_A2(double j, double h) {
    if (classify(j, h) != Stratum::Regular) {
        throw StratumError("A2 is defined on regular fibers only");
    }
    const double dh = h - 1.0;
    // Along J = j tau, H = 1 + (h - 1) tau the integrand is (j S + (h - 1) T) / 2 pi;
    // it has a logarithmic singularity at tau = 0 where the path leaves (0, 1).
    // Below tau = 1e-100 the fiber quantities underflow; the dropped piece of
    // the integral is of order tau log(tau).
    const auto integrand = [&](double tau) {
        if (tau < 1e-100) {
            return 0.0;
        }
        const double jt = j * tau;
        const double g = -dh * tau;
        const auto [S, T] = closed_periods(fiber_params_unchecked(jt, g));
        return (j * S + dh * T) / kTwoPi;
    };
    boost::math::quadrature::tanh_sinh<double> integrator;
    double error = 0.0;
    double l1 = 0.0;
    const double value = integrator.integrate(integrand, 0.0, 1.0, 1e-13, &error, &l1);
    if (!std::isfinite(value) || error > 1e-9 * std::max(1.0, l1)) {
        throw QuadratureFailure("A2 quadrature did not reach 1e-9 (estimate " + std::to_string(error) + ")");
    }
    return value;
}

std::pair<double, double> section_times(const PhasePoint& p) {
    const QuadraticFiberParams q = regular_params(p);
    const auto [S, T] = closed_periods(q);
    const double gamma = amplitude_phase(q, p.z, p.w);
    double t = q.time_scale * elliptic::ellint_F_kc(gamma, q.kc2);
    double s = 0.0;
    if (crosses_poles(q)) {
        s = meridian_plane(p);
    } else {
        s = std::atan2(p.y, p.x);
        if (q.j != 0.0) {
            s -= q.j * q.time_scale * third_kind(q, gamma);
        }
    }
    const double laps = std::floor(t / T);
    t -= laps * T;
    s -= laps * S;
    if (t >= T) {
        t -= T;
        s -= S;
    }
    return {wrap_angle(s), t};
}

std::pair<double, double> angles(const PhasePoint& p) {
    const MomentumValue m = momentum_map(p, Potential::quadratic());
    const PeriodLattice lattice = period_generators(m.j, m.h);
    if (lattice.rank != 2) {
        throw StratumError("angles are defined on regular fibers only");
    }
    const auto [s, t] = section_times(p);
    return {wrap_angle(s - lattice.S * t / lattice.T), wrap_angle(kTwoPi * t / lattice.T)};
}

std::pair<double, double> angles_case_formulas(const PhasePoint& p) {
    const QuadraticFiberParams q = regular_params(p);
    const double a = std::asin(std::clamp(p.z / std::sqrt(q.z_minus), -1.0, 1.0));
    const double f = elliptic::ellint_F_kc(a, q.kc2);
    const double big_k = elliptic::ellint_K_kc(q.kc2);
    const double theta = azimuth_with_pole_convention(p);
    double twist = 0.0;
    if (q.j != 0.0) {
        const double pi_c = elliptic::ellint_Pi_complete_kcn(q.n, q.one_minus_z_minus, q.kc2);
        twist = q.j * q.time_scale * (third_kind(q, a) - f / big_k * pi_c);
    }
    if (p.w >= 0.0) {
        return {wrap_angle(theta - twist), wrap_angle(0.5 * kPi * f / big_k)};
    }
    // Over the poles the descending half sits in the opposite meridian half-plane.
    const double flip = crosses_poles(q) ? kPi : 0.0;
    return {wrap_angle(theta + twist + flip), wrap_angle(kPi - 0.5 * kPi * f / big_k)};
}

FiberActions ActionCache::get(double j, double h) {
    const std::pair<double, double> key{j, h};
    {
        std::shared_lock lock(mutex_);
        const auto it = entries_.find(key);
        if (it != entries_.end()) {
            return it->second;
        }
    }
    const PeriodLattice lattice = period_generators(j, h);
    const FiberActions value{lattice.S, lattice.T, action_A2(j, h)};
    std::unique_lock lock(mutex_);
    return entries_.try_emplace(key, value).first->second;
}

std::size_t ActionCache::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

ActionAngleCoords action_angle_coords(const PhasePoint& p, ActionCache* cache) {
    const MomentumValue m = momentum_map(p, Potential::quadratic());
    const double a2 = cache != nullptr ? cache->get(m.j, m.h).A2 : action_A2(m.j, m.h);
    const auto [alpha1, alpha2] = angles(p);
    return {m.j, a2, alpha1, alpha2};
}

ActionsRow actions_row(double j, double h) {
    ActionsRow row;
    row.j = j;
    row.h = h;
    row.stratum = classify(j, h);
    if (row.stratum == Stratum::EllipticBoundary) {
        row.k = 0.0;
        row.ell = std::sqrt(std::max(0.0, 2.0 * h - j * j));
        return row;
    }
    const QuadraticFiberParams q = fiber_params(j, h);
    const PeriodLattice lattice = period_generators(j, h);
    row.k = q.parameter;
    row.ell = q.ell;
    row.S_formula = lattice.S;
    row.T_formula = lattice.T;
    const oracle::MeasuredPeriods measured = oracle::measure_period(j, h, Potential::quadratic());
    row.S_oracle = measured.S;
    row.T_oracle = measured.T;
    row.A2 = action_A2(j, h);
    const double t_rel = std::abs(lattice.T - measured.T) / measured.T;
    const double s_abs = std::abs(angle_difference(lattice.S, measured.S));
    row.discrepancy = t_rel > kDiscrepancyThreshold || s_abs > kDiscrepancyThreshold * std::max(1.0, std::abs(measured.S));
    return row;
}

void write_actions_csv(std::ostream& out, const std::vector<ActionsRow>& rows) {
    const auto field = [](const std::optional<double>& v) { return v ? io::format_real(*v) : std::string(); };
    out << "j,h,k,ell,S_formula,T_formula,S_oracle,T_oracle,A2,discrepancy_flag\n";
    for (const ActionsRow& r : rows) {
        out << io::join_csv({io::format_real(r.j), io::format_real(r.h), field(r.k), field(r.ell), field(r.S_formula),
                             field(r.T_formula), field(r.S_oracle), field(r.T_oracle), field(r.A2),
                             r.discrepancy ? "1" : "0"})
            << '\n';
    }
}

}  // namespace spdlm
