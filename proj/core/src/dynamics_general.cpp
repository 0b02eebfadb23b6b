#include "spdlm/dynamics_general.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <tuple>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "spdlm/errors.hpp"
#include "spdlm/io.hpp"

namespace spdlm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = kPi / 2;
// Inside this fraction of the band width Q is interpolated towards its limit.
constexpr double kEdgeFraction = 1e-5;
// Boost's error estimate bottoms out near 1e-14 relative; asking for less
// sends every interval to full depth.
constexpr double kQuadTolerance = 1e-12;
constexpr unsigned kQuadDepth = 12;

template <class F>
double integrate(F f, double lo, double hi) {
    if (lo == hi) {
        return 0.0;
    }
    if (hi < lo) {
        return -integrate(f, hi, lo);
    }
    double error = 0.0;
    const double value =
        boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, lo, hi, kQuadDepth, kQuadTolerance, &error);
    if (!std::isfinite(value)) {
        throw QuadratureFailure("phase quadrature produced a non-finite value");
    }
    return value;
}

double find_root(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0) {
        return lo;
    }
    if (fhi == 0.0) {
        return hi;
    }
    if ((flo > 0.0) == (fhi > 0.0)) {
        throw DomainError("turning point is not bracketed; is the potential admissible?");
    }
    boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits - 1);
    std::uintmax_t iterations = 300;
    const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iterations);
    return 0.5 * (a + b);
}

void require_regular(double j, double h) {
    switch (classify(j, h)) {
        case Stratum::Regular:
            return;
        case Stratum::EllipticBoundary:
            throw NearSingularFiber("fiber (" + std::to_string(j) + ", " + std::to_string(h) +
                                    ") is within the boundary band");
        case Stratum::FocusFocus:
            throw StratumError("the focus-focus fiber has no regular flow");
        case Stratum::Outside:
            throw StratumError("outside momentum image");
    }
}

struct Start {
    double psi = 0.0;
    double theta = 0.0;  // azimuth, or meridian plane on pole-crossing fibers
};

Start locate(const FiberGeometry& g, const PhasePoint& p) {
    Start s;
    s.psi = g.phase_of(p.z, p.w);
    s.theta = g.crosses_poles() ? meridian_plane(p) : std::atan2(p.y, p.x);
    return s;
}

PhasePoint advance(const FiberGeometry& g, const Start& start, double t, const Potential& potential) {
    const double period = g.period();
    const double laps = std::floor(t / period);
    double rest = t - laps * period;
    if (rest >= period) {
        rest = 0.0;
    }
    const double psi = g.phase_after(start.psi, rest);
    if (g.crosses_poles()) {
        return meridian_point(psi, std::sqrt(g.q_factor(psi)), start.theta);
    }
    const double theta = start.theta + laps * g.azimuth_per_period() + g.azimuth_between(start.psi, psi);
    const double z = g.height(psi);
    const double w = g.vertical_rate(psi);
    return assemble_point(z, w, theta, g.j(), 2.0 * (g.h() - potential.value(z)));
}

}  // namespace

ChartPoint FlowState::chart_point() const {
    if (point.z > 0.0) {
        return to_chart(point, Chart::North);
    }
    if (point.z < 0.0) {
        return to_chart(point, Chart::South);
    }
    return to_chart(point, Chart::Equator);
}

int branch_sign(const PhasePoint& p) {
    const double zw = p.z * p.w;
    if (zw > 0.0) {
        return -1;
    }
    if (zw < 0.0) {
        return 1;
    }
    return 0;
}

FlowState make_flow_state(const PhasePoint& p, const Potential& potential) {
    const MomentumValue m = momentum_map(p, potential);
    return {p, m.j, m.h, branch_sign(p)};
}

Vec4 rhs_H(const ChartPoint& c, const Potential& potential) {
    if (c.chart == Chart::Equator) {
        throw ChartDomainError("no flow is written in the equator chart");
    }
    const double rho = c.coords[0];
    const double eta = c.coords[1];
    if (!(rho > 0.0 && rho < 1.0)) {
        throw ChartDomainError("X_H needs 0 < rho < 1");
    }
    if (!(eta > 0.0)) {
        throw ChartDomainError("X_H needs eta > 0");
    }
    const double sd = std::sin(c.delta());
    const double cd = std::cos(c.delta());
    const double one_minus = (1.0 - rho) * (1.0 + rho);
    const double dv = potential.profile_derivative(c.chart, rho);
    const double bracket = rho * eta * (1.0 - rho * rho * sd * sd) / one_minus + one_minus * dv / eta;
    return {eta * cd, -bracket * eta * cd, eta * sd / rho, bracket * sd};
}

VectorFields vector_fields(const ChartPoint& c, const Potential& potential) {
    return {{0.0, 0.0, 1.0, 1.0}, rhs_H(c, potential)};
}

FiberGeometry::FiberGeometry(double j, double h, const Potential& potential)
    : j_(j), h_(h), potential_(&potential) {
    require_regular(j, h);
    if (j == 0.0 && h > 1.0) {
        pole_crossing_ = true;
        a_ = -1.0;
        b_ = 1.0;
    } else if (j == 0.0) {
        const auto gap = [&](double z) { return h - potential.value(z); };
        b_ = find_root(gap, 0.0, 1.0);
        a_ = find_root(gap, -1.0, 0.0);
    } else {
        const auto p = [this](double z) { return p_value(z); };
        b_ = find_root(p, 0.0, 1.0);
        a_ = find_root(p, -1.0, 0.0);
    }
    mid_ = 0.5 * (a_ + b_);
    half_ = 0.5 * (b_ - a_);
    if (!pole_crossing_) {
        q_high_ = -p_slope(b_) / (b_ - a_);
        q_low_ = p_slope(a_) / (b_ - a_);
    }
    period_ = time_between(-kHalfPi, 3.0 * kHalfPi);
    azimuth_period_ = azimuth_between(-kHalfPi, 3.0 * kHalfPi);
}

double FiberGeometry::p_value(double z) const {
    return 2.0 * (1.0 - z) * (1.0 + z) * (h_ - potential_->value(z)) - j_ * j_;
}

double FiberGeometry::p_slope(double z) const {
    return -4.0 * z * (h_ - potential_->value(z)) - 2.0 * (1.0 - z) * (1.0 + z) * potential_->derivative(z);
}

double FiberGeometry::height(double psi) const {
    return mid_ + half_ * std::sin(psi);
}

double FiberGeometry::q_factor(double psi) const {
    const double z = height(psi);
    if (pole_crossing_) {
        return 2.0 * (h_ - potential_->value(z));
    }
    const double edge = kEdgeFraction * (b_ - a_);
    const double to_high = b_ - z;
    const double to_low = z - a_;
    if (to_high < edge) {
        const double ze = b_ - edge;
        const double qe = p_value(ze) / ((ze - a_) * edge);
        return q_high_ + (qe - q_high_) * std::max(0.0, to_high) / edge;
    }
    if (to_low < edge) {
        const double ze = a_ + edge;
        const double qe = p_value(ze) / (edge * (b_ - ze));
        return q_low_ + (qe - q_low_) * std::max(0.0, to_low) / edge;
    }
    const double c = std::cos(psi);
    return p_value(z) / (half_ * half_ * c * c);
}

double FiberGeometry::vertical_rate(double psi) const {
    return half_ * std::cos(psi) * std::sqrt(q_factor(psi));
}

double FiberGeometry::phase_of(double z, double w) const {
    const double s = std::clamp((z - mid_) / half_, -1.0, 1.0);
    const double principal = std::asin(s);
    const double c = w / (half_ * std::sqrt(q_factor(principal)));
    return std::atan2(s, c);
}

double FiberGeometry::time_between(double psi0, double psi1) const {
    return integrate([this](double psi) { return 1.0 / std::sqrt(q_factor(psi)); }, psi0, psi1);
}

double FiberGeometry::azimuth_between(double psi0, double psi1) const {
    if (j_ == 0.0) {
        return 0.0;
    }
    return j_ * integrate(
                    [this](double psi) {
                        const double z = height(psi);
                        return 1.0 / ((1.0 - z) * (1.0 + z) * std::sqrt(q_factor(psi)));
                    },
                    psi0, psi1);
}

double FiberGeometry::phase_after(double psi0, double t) const {
    if (t == 0.0) {
        return psi0;
    }
    const double lo = t > 0.0 ? psi0 : psi0 - 2.0 * kPi;
    const double hi = t > 0.0 ? psi0 + 2.0 * kPi : psi0;
    const double guess = std::clamp(psi0 + 2.0 * kPi * t / period_, lo, hi);
    const auto f = [&](double psi) {
        return std::make_tuple(time_between(psi0, psi) - t, 1.0 / std::sqrt(q_factor(psi)));
    };
    std::uintmax_t iterations = 80;
    return boost::math::tools::newton_raphson_iterate(f, guess, lo, hi, std::numeric_limits<double>::digits - 6,
                                                      iterations);
}

double R_eps(double t, double rho0, double j, double h, const Potential& potential, int eps, Chart hemisphere) {
    if (eps != 1 && eps != -1) {
        throw std::invalid_argument("R_eps: eps must be +1 or -1");
    }
    if (hemisphere == Chart::Equator) {
        throw ChartDomainError("R_eps is written in the polar charts");
    }
    if (!(rho0 >= 0.0 && rho0 <= 1.0)) {
        throw OutsideFiber("R_eps: rho0 must lie in [0, 1]");
    }
    const double band = 2.0 * rho0 * rho0 * (h - potential.profile(hemisphere, rho0)) - j * j;
    if (band < -1e-12) {
        throw OutsideFiber("R_eps: rho0 is not in the allowed band of the fiber");
    }
    if (t == 0.0) {
        return rho0;
    }
    const FiberGeometry g(j, h, potential);
    const double sign = hemisphere == Chart::South ? -1.0 : 1.0;
    const double z0 = sign * std::sqrt((1.0 - rho0) * (1.0 + rho0));
    const double mid = 0.5 * (g.z_low() + g.z_high());
    const double half = 0.5 * (g.z_high() - g.z_low());
    const double psi0 = std::asin(std::clamp((z0 - mid) / half, -1.0, 1.0));
    const double psi_equator = std::asin(std::clamp(-mid / half, -1.0, 1.0));
    // d psi / dt has the sign of dz/dt, which is -eps in the north and +eps in the south.
    const double target = hemisphere == Chart::South ? eps * t : -eps * t;
    double limit = 0.0;
    if (hemisphere == Chart::North) {
        limit = target > 0.0 ? kHalfPi : psi_equator;
    } else {
        limit = target > 0.0 ? psi_equator : -kHalfPi;
    }
    const double available = std::abs(g.time_between(psi0, limit));
    if (std::abs(target) > available * (1.0 + 1e-12) + 1e-14) {
        throw BranchExhausted("R_eps: t runs past the end of the branch at |t| = " + std::to_string(available));
    }
    double psi = limit;
    if (std::abs(target) < available) {
        const double lo = std::min(psi0, limit);
        const double hi = std::max(psi0, limit);
        const auto f = [&](double x) { return g.time_between(psi0, x) - target; };
        psi = find_root(f, lo, hi);
    }
    const double z = g.height(psi);
    return std::sqrt(std::max(0.0, (1.0 - z) * (1.0 + z)));
}

FlowState flow_H(const FlowState& s0, double t, const Potential& potential) {
    require_regular(s0.j, s0.h);
    if (t == 0.0) {
        return s0;
    }
    const FiberGeometry g(s0.j, s0.h, potential);
    const PhasePoint p = advance(g, locate(g, s0.point), t, potential);
    return {p, s0.j, s0.h, branch_sign(p)};
}

std::vector<FlowState> flow_H_samples(const FlowState& s0, std::span<const double> times,
                                      const Potential& potential) {
    require_regular(s0.j, s0.h);
    const FiberGeometry g(s0.j, s0.h, potential);
    const Start start = locate(g, s0.point);
    std::vector<FlowState> out;
    out.reserve(times.size());
    for (double t : times) {
        if (t == 0.0) {
            out.push_back(s0);
            continue;
        }
        const PhasePoint p = advance(g, start, t, potential);
        out.push_back({p, s0.j, s0.h, branch_sign(p)});
    }
    return out;
}

FlowState flow_J(const FlowState& s0, double s) {
    const double c = std::cos(s);
    const double sn = std::sin(s);
    const PhasePoint& p = s0.point;
    FlowState out = s0;
    out.point = {c * p.x - sn * p.y, sn * p.x + c * p.y, p.z, c * p.u - sn * p.v, sn * p.u + c * p.v, p.w};
    return out;
}

FlowState joint_flow(const FlowState& s0, double s, double t, const Potential& potential) {
    return flow_J(flow_H(s0, t, potential), s);
}

void write_trajectory_csv(std::ostream& out, std::span<const double> times, std::span<const PhasePoint> points,
                          const Potential& potential) {
    if (times.size() != points.size()) {
        throw std::invalid_argument("write_trajectory_csv: times and points differ in length");
    }
    out << "t,x,y,z,u,v,w,j,h\n";
    for (std::size_t i = 0; i < times.size(); ++i) {
        const PhasePoint& p = points[i];
        const MomentumValue m = momentum_map(p, potential);
        out << io::join_csv({io::format_real(times[i]), io::format_real(p.x), io::format_real(p.y),
                             io::format_real(p.z), io::format_real(p.u), io::format_real(p.v),
                             io::format_real(p.w), io::format_real(m.j), io::format_real(m.h)})
            << '\n';
    }
}

}  // namespace spdlm
