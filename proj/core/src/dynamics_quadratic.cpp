#include "spdlm/dynamics_quadratic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "spdlm/elliptic.hpp"
#include "spdlm/errors.hpp"
#include "spdlm/io.hpp"

namespace spdlm {

namespace {

constexpr double kPi = std::numbers::pi;

bool crosses_poles(const QuadraticFiberParams& q) {
    return q.j == 0.0 && q.h > 1.0;
}

// Elliptic argument and azimuth of a point, ready to be advanced.
struct Anchor {
    QuadraticFiberParams params;
    double gamma0 = 0.0;
    double u0 = 0.0;
    double pi0 = 0.0;
    double theta0 = 0.0;
};

Anchor anchor_of(const PhasePoint& p) {
    const MomentumValue m = momentum_map(p, Potential::quadratic());
    Anchor a;
    a.params = fiber_params(m.j, m.h);
    a.gamma0 = amplitude_phase(a.params, p.z, p.w);
    a.u0 = elliptic::ellint_F_kc(a.gamma0, a.params.kc2);
    if (crosses_poles(a.params)) {
        a.theta0 = meridian_plane(p);
    } else {
        a.theta0 = std::atan2(p.y, p.x);
        if (a.params.j != 0.0) {
            a.pi0 = elliptic::ellint_Pi_kcn(a.gamma0, a.params.n, a.params.one_minus_z_minus, a.params.kc2);
        }
    }
    return a;
}

PhasePoint evaluate(const Anchor& a, double t) {
    const QuadraticFiberParams& q = a.params;
    if (t == 0.0) {
        return quadratic_point(q, a.gamma0, a.theta0);
    }
    const double gamma = elliptic::jacobi_am_kc(a.u0 + t / q.time_scale, q.kc2);
    double theta = a.theta0;
    if (q.j != 0.0) {
        theta += q.j * q.time_scale * (elliptic::ellint_Pi_kcn(gamma, q.n, q.one_minus_z_minus, q.kc2) - a.pi0);
    }
    return quadratic_point(q, gamma, theta);
}

PhasePoint rotate(const PhasePoint& p, double s) {
    if (s == 0.0) {
        return p;
    }
    const double c = std::cos(s);
    const double sn = std::sin(s);
    return {c * p.x - sn * p.y, sn * p.x + c * p.y, p.z, c * p.u - sn * p.v, sn * p.u + c * p.v, p.w};
}

}  // namespace

QuadraticFiberParams fiber_params(double j, double h) {
    const Stratum stratum = classify(j, h);
    if (stratum != Stratum::Regular) {
        throw StratumError("fiber (" + std::to_string(j) + ", " + std::to_string(h) + ") is " +
                           std::string(to_string(stratum)) + ", not regular");
    }
    QuadraticFiberParams q = fiber_params_unchecked(j, 1.0 - h);
    q.h = h;
    return q;
}

QuadraticFiberParams fiber_params_unchecked(double j, double one_minus_h) {
    const double g = one_minus_h;
    const double h = 1.0 - g;
    QuadraticFiberParams q;
    q.j = j;
    q.h = h;
    const double d = std::hypot(g, std::sqrt(2.0) * j);
    const double ell2 = 2.0 * h - j * j;
    q.ell = std::sqrt(std::max(0.0, ell2));
    q.z_plus = 0.5 * (2.0 - g + d);
    // Z- Z+ = ell^2 / 2, which avoids the cancellation in (1 + h - d) / 2.
    q.z_minus = ell2 / (2.0 - g + d);
    q.one_minus_z_minus = g < 0.0 ? j * j / (d - g) : 0.5 * (g + d);
    q.parameter = q.z_minus / q.z_plus;
    q.modulus = std::sqrt(q.parameter);
    q.kc2 = d / q.z_plus;
    q.n = q.z_minus;
    q.time_scale = 1.0 / std::sqrt(2.0 * q.z_plus);
    return q;
}

double R_eps_closed(double t, double rho0, const QuadraticFiberParams& params, int eps) {
    if (eps != 1 && eps != -1) {
        throw std::invalid_argument("R_eps_closed: eps must be +1 or -1");
    }
    if (!(rho0 >= 0.0 && rho0 <= 1.0)) {
        throw DomainError("R_eps_closed: rho0 must lie in [0, 1]");
    }
    double arg = std::sqrt((1.0 - rho0) * (1.0 + rho0)) / std::sqrt(params.z_minus);
    if (arg > 1.0 + 1e-12) {
        throw DomainError("R_eps_closed: rho0 is below the band of the fiber");
    }
    arg = std::min(arg, 1.0);
    const double u = elliptic::ellint_F_kc(std::asin(arg), params.kc2) - eps * t / params.time_scale;
    const double sn = std::sin(elliptic::jacobi_am_kc(u, params.kc2));
    return std::sqrt(std::max(0.0, 1.0 - params.z_minus * sn * sn));
}

double amplitude_phase(const QuadraticFiberParams& params, double z, double w) {
    const double root = std::sqrt(params.z_minus);
    const double s = std::clamp(z / root, -1.0, 1.0);
    const double dn = std::sqrt(std::max(0.0, 1.0 - z * z / params.z_plus));
    const double c = w * params.time_scale / (root * dn);
    return std::atan2(s, c);
}

PhasePoint quadratic_point(const QuadraticFiberParams& params, double gamma, double theta) {
    const double s = std::sin(gamma);
    const double c = std::cos(gamma);
    const double dn = std::sqrt(c * c + params.kc2 * s * s);
    if (crosses_poles(params)) {
        return meridian_point(gamma, dn / params.time_scale, theta);
    }
    const double root = std::sqrt(params.z_minus);
    const double z = root * s;
    const double w = root * c * dn / params.time_scale;
    return assemble_point(z, w, theta, params.j, 2.0 * (params.h - z * z));
}

PhasePoint joint_flow_quadratic(const PhasePoint& init, double s, double t) {
    return rotate(evaluate(anchor_of(init), t), s);
}

PhasePoint joint_flow_quadratic(const ChartPoint& init, double s, double t) {
    const PhasePoint p = from_chart(init);
    if (s == 0.0 && t == 0.0) {
        return p;
    }
    return joint_flow_quadratic(p, s, t);
}

std::vector<PhasePoint> flow_quadratic_samples(const PhasePoint& init, std::span<const double> times) {
    const Anchor a = anchor_of(init);
    std::vector<PhasePoint> out;
    out.reserve(times.size());
    for (double t : times) {
        out.push_back(t == 0.0 ? init : evaluate(a, t));
    }
    return out;
}

std::pair<double, double> section_trajectory(double j, double h, double t) {
    const QuadraticFiberParams q = fiber_params(j, h);
    const double gamma = elliptic::jacobi_am_kc(t / q.time_scale, q.kc2);
    const double s = std::sin(gamma);
    const double rho = std::sqrt(std::max(0.0, 1.0 - q.z_minus * s * s));
    if (j != 0.0) {
        return {rho, q.j * q.time_scale * elliptic::ellint_Pi_kcn(gamma, q.n, q.one_minus_z_minus, q.kc2)};
    }
    if (!crosses_poles(q)) {
        return {rho, 0.0};
    }
    // Each pass over a pole turns the azimuth by pi; a point on the pole is
    // counted as arriving.
    const double passes = std::ceil((gamma - 0.5 * kPi) / kPi);
    const bool odd = std::fmod(std::abs(passes), 2.0) == 1.0;
    return {std::abs(std::cos(gamma)), odd ? kPi : 0.0};
}

double eta_closed_form(const QuadraticFiberParams& params, double gamma) {
    const double s2 = std::sin(gamma) * std::sin(gamma);
    const double m = params.modulus;
    const double value = params.j * params.j + std::sqrt(2.0) * params.h * m * params.ell * s2 -
                         m * m * params.ell * params.ell * s2 * s2;
    return std::sqrt(std::max(0.0, value));
}

double phi_arcsin_form(const ChartPoint& init, double rho, double eta, double theta) {
    const double rho0 = init.coords[0];
    const double eta0 = init.coords[1];
    const double j = rho0 * eta0 * std::sin(init.delta());
    return init.phi() + std::asin(std::clamp(j / (rho0 * eta0), -1.0, 1.0)) -
           std::asin(std::clamp(j / (rho * eta), -1.0, 1.0)) + (theta - init.theta());
}

void write_quadratic_trajectory_csv(std::ostream& out, std::span<const double> times,
                                    std::span<const PhasePoint> points) {
    if (times.size() != points.size()) {
        throw std::invalid_argument("write_quadratic_trajectory_csv: times and points differ in length");
    }
    out << "t,x,y,z,u,v,w,j,h,k,ell,gamma\n";
    if (points.empty()) {
        return;
    }
    const Potential quadratic = Potential::quadratic();
    const MomentumValue first = momentum_map(points.front(), quadratic);
    const QuadraticFiberParams q = fiber_params(first.j, first.h);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const PhasePoint& p = points[i];
        const MomentumValue m = momentum_map(p, quadratic);
        out << io::join_csv({io::format_real(times[i]), io::format_real(p.x), io::format_real(p.y),
                             io::format_real(p.z), io::format_real(p.u), io::format_real(p.v),
                             io::format_real(p.w), io::format_real(m.j), io::format_real(m.h),
                             io::format_real(q.parameter), io::format_real(q.ell),
                             io::format_real(amplitude_phase(q, p.z, p.w))})
            << '\n';
    }
}

}  // namespace spdlm
