#pragma once

// Flows of J and H for an arbitrary admissible potential, solved by quadrature.
//
// Along a fiber (j, h) the height obeys zdot^2 = P(z) = 2 (1 - z^2)(h - V(z)) - j^2,
// which vanishes at the two turning heights z_lo < 0 < z_hi. Writing
// z = m + r sin(psi) with m, r the midpoint and half-width of [z_lo, z_hi]
// turns the oscillation into a monotone phase psi with psidot = sqrt(Q), where
// Q = P / ((z - z_lo)(z_hi - z)) stays positive and smooth at both turning
// points. Times and azimuth advances are then regular integrals in psi, and
// the equator crossing is just a point on the way.

#include <array>
#include <ostream>
#include <span>
#include <vector>

#include "spdlm/phase_space.hpp"

namespace spdlm {

/// A point of a fiber together with its momentum value and branch sign.
struct FlowState {
    PhasePoint point;
    double j = 0.0;
    double h = 0.0;
    /// sgn cos(delta); +1 while rho increases. 0 at a turning point or when
    /// the sign is undefined (pole, equator).
    int eps = 0;

    /// North for z > 0, South for z < 0, Equator on z = 0.
    [[nodiscard]] ChartPoint chart_point() const;
};

[[nodiscard]] FlowState make_flow_state(const PhasePoint& p, const Potential& potential);

/// sgn cos(delta) read off the Cartesian point: -sgn(z w).
[[nodiscard]] int branch_sign(const PhasePoint& p);

struct VectorFields {
    Vec4 x_j{};
    Vec4 x_h{};
};

/// Hamiltonian vector fields of J and H in a polar chart (North or South).
[[nodiscard]] VectorFields vector_fields(const ChartPoint& c, const Potential& potential);

/// (drho/dt, deta/dt, dtheta/dt, dphi/dt) under H; the same field as X_H.
[[nodiscard]] Vec4 rhs_H(const ChartPoint& c, const Potential& potential);

/// Turning heights and the smooth phase parametrisation of one fiber.
class FiberGeometry {
public:
    FiberGeometry(double j, double h, const Potential& potential);

    [[nodiscard]] double j() const { return j_; }
    [[nodiscard]] double h() const { return h_; }
    [[nodiscard]] double z_low() const { return a_; }
    [[nodiscard]] double z_high() const { return b_; }
    /// True when the fiber runs over both poles (j = 0, h > 1).
    [[nodiscard]] bool crosses_poles() const { return pole_crossing_; }

    [[nodiscard]] double height(double psi) const;
    /// P(z) / ((z - z_lo)(z_hi - z)), with the endpoint limits filled in.
    [[nodiscard]] double q_factor(double psi) const;
    /// Vertical velocity w at phase psi.
    [[nodiscard]] double vertical_rate(double psi) const;
    /// Phase of a point of this fiber, in (-pi, pi].
    [[nodiscard]] double phase_of(double z, double w) const;

    /// Time to go from psi0 to psi1.
    [[nodiscard]] double time_between(double psi0, double psi1) const;
    /// Azimuth advance from psi0 to psi1, excluding the pi jumps at the poles.
    [[nodiscard]] double azimuth_between(double psi0, double psi1) const;
    /// Phase reached after time t (|t| at most one period) from psi0.
    [[nodiscard]] double phase_after(double psi0, double t) const;

    /// Return time of the height oscillation and the azimuth advance over it.
    [[nodiscard]] double period() const { return period_; }
    [[nodiscard]] double azimuth_per_period() const { return azimuth_period_; }

private:
    [[nodiscard]] double p_value(double z) const;
    [[nodiscard]] double p_slope(double z) const;

    double j_;
    double h_;
    const Potential* potential_;
    double a_ = -1.0;
    double b_ = 1.0;
    double mid_ = 0.0;
    double half_ = 1.0;
    bool pole_crossing_ = false;
    double q_low_ = 0.0;
    double q_high_ = 0.0;
    double period_ = 0.0;
    double azimuth_period_ = 0.0;
};

/// rho(t) on a single branch of the hemisphere chart: the solution of
///   int_{rho0}^{rho} rho drho / sqrt((1 - rho^2)(2 rho^2 (h - V~(rho)) - j^2)) = eps t.
/// Throws OutsideFiber if rho0 is not in the allowed band and BranchExhausted
/// if the branch ends (turning point or equator) before |t|.
[[nodiscard]] double R_eps(double t, double rho0, double j, double h, const Potential& potential, int eps,
                           Chart hemisphere = Chart::North);

/// Flow of H for time t (either sign). Throws StratumError off regular
/// fibers and NearSingularFiber within the boundary band.
[[nodiscard]] FlowState flow_H(const FlowState& s0, double t, const Potential& potential);

/// Rotation about the z axis by s.
[[nodiscard]] FlowState flow_J(const FlowState& s0, double s);

/// flow_J(flow_H(s0, t), s).
[[nodiscard]] FlowState joint_flow(const FlowState& s0, double s, double t, const Potential& potential);

/// Samples of the H-flow at the given times, sharing one fiber geometry.
[[nodiscard]] std::vector<FlowState> flow_H_samples(const FlowState& s0, std::span<const double> times,
                                                     const Potential& potential);

/// Writes "t,x,y,z,u,v,w,j,h" rows with momentum values recomputed per sample.
void write_trajectory_csv(std::ostream& out, std::span<const double> times, std::span<const PhasePoint> points,
                          const Potential& potential);

}  // namespace spdlm
