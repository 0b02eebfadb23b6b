#pragma once

// Closed-form flows for V(z) = z^2.
//
// On the fiber (j, h) the squared height Z = z^2 oscillates between 0 and the
// smaller root Z- of 2 (1 - Z)(h - Z) = j^2; the larger root is Z+. With
// modulus m = sqrt(Z- / Z+) the height is z = sqrt(Z-) sn(u, m), u = u0 + t / c,
// c = 1 / sqrt(2 Z+), and the azimuth advances by j c Pi(am u, Z-, m).

#include <ostream>
#include <span>
#include <utility>
#include <vector>

#include "spdlm/phase_space.hpp"

namespace spdlm {

struct QuadraticFiberParams {
    double j = 0.0;
    double h = 0.0;
    /// The ratio Z- / Z+, written k in the customary closed forms. It is the
    /// parameter (squared modulus) of the elliptic functions below.
    double parameter = 0.0;
    /// sqrt(parameter): the modulus actually passed to F, K, Pi, am, sn.
    double modulus = 0.0;
    /// 1 - modulus^2, computed without cancellation.
    double kc2 = 1.0;
    double ell = 0.0;  ///< sqrt(2h - j^2)
    /// Characteristic of the third-kind integrals; equals Z-.
    double n = 0.0;
    double z_minus = 0.0;
    double z_plus = 0.0;
    /// 1 - Z-, computed without cancellation.
    double one_minus_z_minus = 1.0;
    /// Time per unit of elliptic argument, 1 / sqrt(2 Z+).
    double time_scale = 0.0;
};

/// Throws StratumError unless (j, h) is regular.
[[nodiscard]] QuadraticFiberParams fiber_params(double j, double h);

/// Same quantities for h = 1 - one_minus_h with no stratum check; taking 1 - h
/// directly keeps the digits of fibers close to the focus-focus value.
[[nodiscard]] QuadraticFiberParams fiber_params_unchecked(double j, double one_minus_h);

/// rho(t) started from rho0 on the branch eps = sgn cos(delta). Valid for all
/// t: the turning points are absorbed by sn.
[[nodiscard]] double R_eps_closed(double t, double rho0, const QuadraticFiberParams& params, int eps);

/// Amplitude phase gamma of a point of the fiber: z = sqrt(Z-) sin(gamma) and
/// cos(gamma) has the sign of w. In (-pi, pi].
[[nodiscard]] double amplitude_phase(const QuadraticFiberParams& params, double z, double w);

/// Point of the fiber at amplitude phase gamma and azimuth theta (the
/// meridian plane when the fiber runs over the poles).
[[nodiscard]] PhasePoint quadratic_point(const QuadraticFiberParams& params, double gamma, double theta);

/// Phi_J^s o Phi_H^t applied to the point given in chart coordinates.
[[nodiscard]] PhasePoint joint_flow_quadratic(const ChartPoint& init, double s, double t);
[[nodiscard]] PhasePoint joint_flow_quadratic(const PhasePoint& init, double s, double t);

/// Samples of Phi_H^t from one start.
[[nodiscard]] std::vector<PhasePoint> flow_quadratic_samples(const PhasePoint& init, std::span<const double> times);

/// rho and theta at time t along the orbit of (1, 0, 0, 0, j, sqrt(2h - j^2)).
[[nodiscard]] std::pair<double, double> section_trajectory(double j, double h, double t);

/// The closed-form expression for eta at amplitude gamma,
/// sqrt(j^2 + sqrt(2) h m ell sin^2 - m^2 ell^2 sin^4), with m the modulus.
[[nodiscard]] double eta_closed_form(const QuadraticFiberParams& params, double gamma);

/// The arcsin form of phi(t) for a start in the north chart: phi0 + asin(j / (rho0 eta0))
/// - asin(j / (rho eta)) + (theta(t) - theta0). Holds while eps = -1; kept for tests.
[[nodiscard]] double phi_arcsin_form(const ChartPoint& init, double rho, double eta, double theta);

/// Writes "t,x,y,z,u,v,w,j,h,k,ell,gamma" rows.
void write_quadratic_trajectory_csv(std::ostream& out, std::span<const double> times,
                                    std::span<const PhasePoint> points);

}  // namespace spdlm
