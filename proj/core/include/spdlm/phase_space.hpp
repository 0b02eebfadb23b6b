#pragma once

// The constrained phase space T*S^2 inside R^6, its coordinate charts and the
// momentum map (J, H) of the spherical pendulum with an axisymmetric potential.

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace spdlm {

using Vec4 = std::array<double, 4>;
using Vec6 = std::array<double, 6>;

/// A point (x, y, z, u, v, w) of T*R^3; on T*S^2 when |q| = 1 and q.p = 0.
struct PhasePoint {
    double x = 1.0;
    double y = 0.0;
    double z = 0.0;
    double u = 0.0;
    double v = 0.0;
    double w = 0.0;

    [[nodiscard]] Vec6 as_array() const { return {x, y, z, u, v, w}; }
    [[nodiscard]] static PhasePoint from_array(const Vec6& a) {
        return {a[0], a[1], a[2], a[3], a[4], a[5]};
    }
};

/// Largest violation of the sphere and cotangency constraints.
[[nodiscard]] double constraint_residual(const PhasePoint& p);

/// Euclidean distance in R^6.
[[nodiscard]] double distance(const PhasePoint& a, const PhasePoint& b);

enum class Chart { North, South, Equator };

[[nodiscard]] std::string_view to_string(Chart chart);

/// Chart coordinates: (rho, eta, theta, phi) on North/South, (z, w, theta, phi)
/// on Equator. theta and phi are angles reduced to [0, 2 pi).
struct ChartPoint {
    Chart chart = Chart::North;
    Vec4 coords{};

    [[nodiscard]] double theta() const { return coords[2]; }
    [[nodiscard]] double phi() const { return coords[3]; }
    [[nodiscard]] double delta() const { return coords[3] - coords[2]; }
};

/// Axisymmetric potential V(z) on [-1, 1] together with its derivative.
/// Both callables must be re-entrant; they are shared across threads.
class Potential {
public:
    using Fn = std::function<double(double)>;

    Potential(std::string name, Fn value, Fn derivative);

    /// V(z) = z^2, the case with closed-form flows.
    [[nodiscard]] static Potential quadratic();

    [[nodiscard]] const std::string& name() const { return name_; }
    [[nodiscard]] bool is_quadratic() const { return quadratic_; }

    [[nodiscard]] double value(double z) const { return value_(z); }
    [[nodiscard]] double derivative(double z) const { return derivative_(z); }

    /// V restricted to a hemisphere as a function of rho = sqrt(1 - z^2).
    [[nodiscard]] double profile(Chart hemisphere, double rho) const;
    [[nodiscard]] double profile_derivative(Chart hemisphere, double rho) const;

private:
    std::string name_;
    Fn value_;
    Fn derivative_;
    bool quadratic_ = false;
};

/// Checks the normalisation V(+-1) = 1, V(0) = 0, strict monotonicity on each
/// side of 0 and agreement of V' with a difference quotient, on a 1e-3 grid.
/// Returns the first violation found.
[[nodiscard]] std::optional<std::string> admissibility_violation(const Potential& potential);

enum class Stratum { Regular, EllipticBoundary, FocusFocus, Outside };

[[nodiscard]] std::string_view to_string(Stratum stratum);

/// Absolute band around the boundary parabola and the focus-focus value.
inline constexpr double kStratumBand = 1e-10;
/// Values further than this below the parabola are outside the image.
inline constexpr double kOutsideTolerance = 1e-12;

struct MomentumValue {
    double j = 0.0;
    double h = 0.0;
    Stratum stratum = Stratum::Regular;
};

/// Stratum of (j, h) in the momentum image {h >= j^2 / 2}.
[[nodiscard]] Stratum classify(double j, double h);

/// Nearest point of T*S^2: normalises the position and removes the radial
/// momentum. Throws DegenerateInput when |q| < 1e-8.
[[nodiscard]] PhasePoint project(const Vec6& raw);

[[nodiscard]] ChartPoint to_chart(const PhasePoint& p, Chart chart);
[[nodiscard]] PhasePoint from_chart(const ChartPoint& c);

/// J = xv - yu, H = |p|^2 / 2 + V(z).
[[nodiscard]] MomentumValue momentum_map(const PhasePoint& p, const Potential& potential);

/// J and H written in chart coordinates (North/South only).
[[nodiscard]] std::array<double, 2> chart_momentum_map(const ChartPoint& c, const Potential& potential);

/// The pulled-back symplectic form of the chart evaluated on two tangent vectors.
[[nodiscard]] double symplectic_eval(const ChartPoint& c, const Vec4& t1, const Vec4& t2);

/// Canonical form dx^du + dy^dv + dz^dw on two vectors of R^6.
[[nodiscard]] double ambient_form(const Vec6& a, const Vec6& b);

/// Rebuilds a point of the fiber with angular momentum j from its height z,
/// vertical momentum w and azimuth theta. `kinetic2` = |p|^2 = 2 (h - V(z)) is
/// only consulted at the poles, where the radial rate is a limit.
[[nodiscard]] PhasePoint assemble_point(double z, double w, double theta, double j, double kinetic2);

/// Motion confined to the meridian plane at azimuth `plane`: the point at
/// latitude psi (position (cos psi cos plane, cos psi sin plane, sin psi))
/// moving with dpsi/dt = `rate`. Passing over a pole needs no special case.
[[nodiscard]] PhasePoint meridian_point(double psi, double rate, double plane);

/// Azimuth of the meridian plane that meridian_point would need for a point
/// with zero angular momentum whose latitude phase has cos(psi) of the sign of
/// w (w = 0 is read as a pole passage and uses the momentum direction).
[[nodiscard]] double meridian_plane(const PhasePoint& p);

/// Reduces an angle to [0, 2 pi).
[[nodiscard]] double wrap_angle(double a);

// Serialisation with 17 significant digits.
[[nodiscard]] std::string to_json(const PhasePoint& p);
[[nodiscard]] PhasePoint phase_point_from_json(std::string_view text);
[[nodiscard]] std::string to_csv_row(const PhasePoint& p);
[[nodiscard]] PhasePoint phase_point_from_csv_row(std::string_view row);

}  // namespace spdlm
