#pragma once

// Independent numerical ground truth. Nothing in this header uses the closed
// forms or the quadrature flows: trajectories come from a constrained
// Runge-Kutta integration in R^6, periods from a return map, elliptic integrals
// from adaptive Gauss-Kronrod quadrature of their defining integrands.

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "spdlm/phase_space.hpp"

namespace spdlm::oracle {

struct IntegratorConfig {
    double rel_tol = 1e-11;
    double abs_tol = 1e-12;
    double max_step = 0.25;
    /// Longest time a return-map search will integrate before giving up.
    double max_return_time = 1e4;
    /// Orthogonal projection back onto T*S^2 after every accepted step.
    bool project_each_step = true;
};

/// Flows p for time t (either sign) under the Hamiltonian of `potential`,
/// with the Lagrange-multiplier constraint force plus per-step projection.
[[nodiscard]] PhasePoint integrate_reference(const PhasePoint& p, const Potential& potential, double t,
                                             const IntegratorConfig& cfg = {});

/// One integration sampled at `times`, which must be sorted and share a sign
/// (0 allowed). Returns one point per time.
[[nodiscard]] std::vector<PhasePoint> integrate_samples(const PhasePoint& p, const Potential& potential,
                                                        std::span<const double> times,
                                                        const IntegratorConfig& cfg = {});

struct MeasuredPeriods {
    double S = 0.0;  ///< minus the unwrapped azimuth advance over one return
    double T = 0.0;  ///< first return time to {z = 0, w > 0}
    double kinetic_integral = 0.0;  ///< int_0^T |p|^2 dt along the same run
};

/// Return-map periods of the fiber through (1, 0, 0, 0, j, sqrt(2h - j^2)).
[[nodiscard]] MeasuredPeriods measure_period(double j, double h, const Potential& potential,
                                             const IntegratorConfig& cfg = {});

/// (1 / 2 pi) times the canonical 1-form u dx + v dy + w dz integrated over the
/// closed cycle generated by S X_J + T X_H, with S and T from the return map.
[[nodiscard]] double loop_action(double j, double h, const Potential& potential,
                                 const IntegratorConfig& cfg = {});

struct LatticeContinuation {
    /// Fiber values visited, with S continued without 2 pi jumps.
    struct Sample {
        double j = 0.0;
        double h = 0.0;
        double S = 0.0;
        double T = 0.0;
    };
    std::vector<Sample> path;
    /// B_start^{-1} B_end, where B has columns (1, 0) and (S, T) / 2 pi.
    std::array<std::array<double, 2>, 2> transition{};
};

/// Follows the return-map periods once around the circle of the given radius
/// centred on the focus-focus value (0, 1), `samples` points per turn, and
/// reports the change of lattice basis. The samples are offset by half a step
/// so that none lies on j = 0.
[[nodiscard]] LatticeContinuation continue_lattice_around_focus(double radius, int samples,
                                                                const Potential& potential,
                                                                const IntegratorConfig& cfg = {});

using PhaseFunction = std::function<double(const PhasePoint&)>;

/// Poisson bracket on T*S^2 (Dirac bracket of the two constraints) with the
/// ambient gradients of f and g taken by central differences.
[[nodiscard]] double poisson_bracket_fd(const PhaseFunction& f, const PhaseFunction& g, const PhasePoint& p);

/// {J, H} at p for the given potential.
[[nodiscard]] double poisson_bracket_fd(const PhasePoint& p, const Potential& potential);

enum class EllipticKind { F, K, Pi, PiComplete };

/// Adaptive Gauss-Kronrod quadrature of the defining integrand. Arguments not
/// used by a kind are ignored (gamma for complete, n for first kind).
[[nodiscard]] double quadrature_elliptic(EllipticKind kind, double gamma, double n, double k);

}  // namespace spdlm::oracle
