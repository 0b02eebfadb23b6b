#pragma once

// Period lattice, actions and angles of the quadratic pendulum V(z) = z^2.
//
// Angles vanish on L = {(1, 0, 0, 0, v, w) : w > 0}. A point reached from the
// section point (1, 0, 0, 0, j, sqrt(2h - j^2)) by Phi_J^s o Phi_H^t has
// alpha1 = s - S t / T and alpha2 = 2 pi t / T.

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <shared_mutex>
#include <utility>
#include <vector>

#include "spdlm/phase_space.hpp"

namespace spdlm {

struct PeriodLattice {
    int rank = 0;
    double S = 0.0;
    double T = 0.0;
    /// Generators in units of 2 pi: (1, 0) and, for rank 2, (S, T) / 2 pi.
    std::vector<std::array<double, 2>> generators;
};

/// Rank 2 on regular fibers, rank 1 on the boundary; StratumError elsewhere.
/// T = 4 c K(m), S = -4 j c Pi(Z-, m) with the fiber quantities of fiber_params.
[[nodiscard]] PeriodLattice period_generators(double j, double h);

/// The two alternative closed forms for the periods, evaluated literally so
/// that they can be compared with the return map: the general expression with
/// prefactor 2^(1/4) sqrt(k^3 ell) and k the displayed ratio used as the
/// modulus, and the j = 0 expressions 4 sqrt(2h) K(sqrt h), 4 sqrt(2h) K(1 / sqrt h).
struct AlternativePeriods {
    double S_general = 0.0;
    double T_general = 0.0;
    std::optional<double> T_special;
};

[[nodiscard]] AlternativePeriods alternative_period_formulas(double j, double h);

/// (1, 0, 0, 0, j, sqrt(2h - j^2)).
[[nodiscard]] PhasePoint section_point(double j, double h);

/// Integral of (S dJ + T dH) / 2 pi along the segment from (0, 1) to (j, h).
/// Throws QuadratureFailure if the estimate misses 1e-9.
[[nodiscard]] double action_A2(double j, double h);

/// (s, t) with Phi_J^s o Phi_H^t(section point) = p, reduced to t in [0, T)
/// and s in [0, 2 pi).
[[nodiscard]] std::pair<double, double> section_times(const PhasePoint& p);

/// (alpha1, alpha2) in [0, 2 pi)^2 from section_times.
[[nodiscard]] std::pair<double, double> angles(const PhasePoint& p);

/// The same angles from the explicit two-case formulas in z, w and theta,
/// with theta at the poles taken as phi + pi (north) and phi (south).
[[nodiscard]] std::pair<double, double> angles_case_formulas(const PhasePoint& p);

struct ActionAngleCoords {
    double A1 = 0.0;
    double A2 = 0.0;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
};

struct FiberActions {
    double S = 0.0;
    double T = 0.0;
    double A2 = 0.0;
};

/// Memo of (j, h) -> (S, T, A2). Concurrent readers, one writer at a time;
/// entries never change once inserted.
class ActionCache {
public:
    [[nodiscard]] FiberActions get(double j, double h);
    [[nodiscard]] std::size_t size() const;

private:
    mutable std::shared_mutex mutex_;
    std::map<std::pair<double, double>, FiberActions> entries_;
};

[[nodiscard]] ActionAngleCoords action_angle_coords(const PhasePoint& p, ActionCache* cache = nullptr);

/// One row of the actions table. Empty optionals render as empty CSV fields.
struct ActionsRow {
    double j = 0.0;
    double h = 0.0;
    Stratum stratum = Stratum::Regular;
    std::optional<double> k;
    std::optional<double> ell;
    std::optional<double> S_formula;
    std::optional<double> T_formula;
    std::optional<double> S_oracle;
    std::optional<double> T_oracle;
    std::optional<double> A2;
    bool discrepancy = false;
};

/// Relative threshold above which formula and return map are flagged.
inline constexpr double kDiscrepancyThreshold = 1e-6;

/// Fills a row; the oracle columns come from the ODE return map.
[[nodiscard]] ActionsRow actions_row(double j, double h);

void write_actions_csv(std::ostream& out, const std::vector<ActionsRow>& rows);

/// Difference a - b reduced to (-pi, pi].
[[nodiscard]] double angle_difference(double a, double b);

}  // namespace spdlm
