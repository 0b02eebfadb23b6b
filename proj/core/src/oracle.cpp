#include "spdlm/oracle.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "spdlm/errors.hpp"

namespace spdlm::oracle {

namespace {

namespace odeint = boost::numeric::odeint;

constexpr double kPi = std::numbers::pi;
constexpr int kMaxRejectedSteps = 10000;

// State layout: x y z u v w [kinetic_integral].
template <std::size_t N>
using State = std::array<double, N>;

template <std::size_t N>
struct ConstrainedField {
    const Potential* potential;

    void operator()(const State<N>& s, State<N>& ds, double /*t*/) const {
        const double x = s[0], y = s[1], z = s[2], u = s[3], v = s[4], w = s[5];
        const double q2 = x * x + y * y + z * z;
        const double p2 = u * u + v * v + w * w;
        const double dv = potential->derivative(z);
        // Keeps d/dt (q . p) = 0: |p|^2 + q . pdot = 0.
        const double lambda = (dv * z - p2) / q2;
        ds[0] = u;
        ds[1] = v;
        ds[2] = w;
        ds[3] = lambda * x;
        ds[4] = lambda * y;
        ds[5] = lambda * z - dv;
        if constexpr (N > 6) {
            ds[6] = p2;
        }
    }
};

template <std::size_t N>
void project_state(State<N>& s) {
    const double n = std::sqrt(s[0] * s[0] + s[1] * s[1] + s[2] * s[2]);
    s[0] /= n;
    s[1] /= n;
    s[2] /= n;
    const double radial = s[0] * s[3] + s[1] * s[4] + s[2] * s[5];
    s[3] -= radial * s[0];
    s[4] -= radial * s[1];
    s[5] -= radial * s[2];
}

template <std::size_t N>
State<N> make_state(const PhasePoint& p) {
    State<N> s{};
    const Vec6 a = p.as_array();
    for (std::size_t i = 0; i < 6; ++i) {
        s[i] = a[i];
    }
    return s;
}

template <std::size_t N>
PhasePoint point_of(const State<N>& s) {
    return {s[0], s[1], s[2], s[3], s[4], s[5]};
}

template <std::size_t N>
class Integrator {
public:
    using Stepper = odeint::runge_kutta_fehlberg78<State<N>>;

    Integrator(const Potential& potential, const IntegratorConfig& cfg)
        : field_{&potential},
          cfg_(cfg),
          controlled_(odeint::make_controlled(cfg.abs_tol, cfg.rel_tol, Stepper())) {}

    /// One accepted step of at most `limit` (signed); returns the step taken.
    double step(State<N>& s, double& t, double limit) {
        int rejected = 0;
        while (true) {
            double dt = std::copysign(std::min({std::abs(dt_), std::abs(limit), cfg_.max_step}), limit);
            const double t_before = t;
            if (controlled_.try_step(field_, s, t, dt) == odeint::success) {
                if (cfg_.project_each_step) {
                    project_state(s);
                }
                dt_ = std::abs(dt);
                return t - t_before;
            }
            dt_ = std::abs(dt);
            if (++rejected > kMaxRejectedSteps || dt_ < 1e-14) {
                throw StepFailure("oracle: step size collapsed at t=" + std::to_string(t));
            }
        }
    }

    void advance(State<N>& s, double& t, double t_end) {
        while (t != t_end) {
            const double remaining = t_end - t;
            if (std::abs(remaining) <= 1e-14 * std::max(1.0, std::abs(t_end))) {
                t = t_end;
                break;
            }
            step(s, t, remaining);
        }
    }

    /// Single fixed step from s0 of length dt, used to refine section crossings.
    State<N> fixed_step(const State<N>& s0, double t0, double dt) {
        State<N> out = s0;
        Stepper stepper;
        stepper.do_step(field_, out, t0, dt);
        if (cfg_.project_each_step) {
            project_state(out);
        }
        return out;
    }

    [[nodiscard]] const IntegratorConfig& config() const { return cfg_; }

private:
    ConstrainedField<N> field_;
    IntegratorConfig cfg_;
    odeint::controlled_runge_kutta<Stepper> controlled_;
    double dt_ = 1e-3;
};

PhasePoint section_start(double j, double h) {
    const double ell2 = 2.0 * h - j * j;
    if (!(ell2 > 0.0)) {
        throw StratumError("oracle: (j, h) has no section point with w > 0");
    }
    return {1.0, 0.0, 0.0, 0.0, j, std::sqrt(ell2)};
}

struct ReturnRun {
    State<7> state;
    double time;
    double azimuth;
};

// Azimuth change between two positions. theta moves monotonically with the
// sign of j (dtheta/dt = j / rho^2), so the increment is taken in [0, 2 pi) or
// (-2 pi, 0] instead of (-pi, pi]: a step over a pole can turn by nearly pi.
// Integrating j / rho^2 instead loses digits on orbits that graze a pole.
double azimuth_step(const State<7>& a, const State<7>& b, double j) {
    if (j == 0.0) {
        return 0.0;
    }
    const double d = std::atan2(b[1], b[0]) - std::atan2(a[1], a[0]);
    const double turn = 2.0 * kPi;
    return j > 0.0 ? d - turn * std::floor(d / turn) : d - turn * std::ceil(d / turn);
}

// First upward crossing of z = 0 after leaving the section.
ReturnRun first_return(double j, double h, const Potential& potential, const IntegratorConfig& cfg) {
    Integrator<7> integrator(potential, cfg);
    State<7> s = make_state<7>(section_start(j, h));
    double t = 0.0;
    double azimuth = 0.0;
    bool went_below = false;
    while (t < cfg.max_return_time) {
        const State<7> before = s;
        const double t_before = t;
        const double dt = integrator.step(s, t, cfg.max_return_time - t);
        if (s[2] < 0.0) {
            went_below = true;
        }
        if (s[2] < 0.0 || !went_below || before[2] >= 0.0) {
            azimuth += azimuth_step(before, s, j);
            continue;
        }
        const auto height_at = [&](double tau) { return integrator.fixed_step(before, t_before, tau)[2]; };
        boost::math::tools::eps_tolerance<double> tol(std::numeric_limits<double>::digits - 3);
        std::uintmax_t iterations = 200;
        const auto [lo, hi] = boost::math::tools::toms748_solve(height_at, 0.0, dt, before[2], s[2], tol, iterations);
        const double tau = 0.5 * (lo + hi);
        const State<7> crossing = integrator.fixed_step(before, t_before, tau);
        return {crossing, t_before + tau, azimuth + azimuth_step(before, crossing, j)};
    }
    throw SectionMissed("oracle: no return to the section within t=" + std::to_string(cfg.max_return_time));
}

}  // namespace

PhasePoint integrate_reference(const PhasePoint& p, const Potential& potential, double t,
                               const IntegratorConfig& cfg) {
    Integrator<6> integrator(potential, cfg);
    State<6> s = make_state<6>(p);
    double now = 0.0;
    integrator.advance(s, now, t);
    return point_of(s);
}

std::vector<PhasePoint> integrate_samples(const PhasePoint& p, const Potential& potential,
                                          std::span<const double> times, const IntegratorConfig& cfg) {
    Integrator<6> integrator(potential, cfg);
    State<6> s = make_state<6>(p);
    double now = 0.0;
    std::vector<PhasePoint> out;
    out.reserve(times.size());
    for (double target : times) {
        integrator.advance(s, now, target);
        out.push_back(point_of(s));
    }
    return out;
}

MeasuredPeriods measure_period(double j, double h, const Potential& potential, const IntegratorConfig& cfg) {
    const ReturnRun run = first_return(j, h, potential, cfg);
    return {-run.azimuth, run.time, run.state[6]};
}

double loop_action(double j, double h, const Potential& potential, const IntegratorConfig& cfg) {
    const MeasuredPeriods m = measure_period(j, h, potential, cfg);
    // Along X_J the 1-form pairs to x v - y u = j.
    return (m.kinetic_integral + j * m.S) / (2.0 * kPi);
}

LatticeContinuation continue_lattice_around_focus(double radius, int samples, const Potential& potential,
                                                  const IntegratorConfig& cfg) {
    if (samples < 4 || !(radius > 0.0)) {
        throw std::invalid_argument("lattice continuation needs radius > 0 and at least 4 samples");
    }
    LatticeContinuation out;
    for (int i = 0; i <= samples; ++i) {
        const double angle = (i + 0.5) * 2.0 * kPi / samples;
        const double j = radius * std::cos(angle);
        const double h = 1.0 + radius * std::sin(angle);
        const MeasuredPeriods m = measure_period(j, h, potential, cfg);
        double S = m.S;
        if (!out.path.empty()) {
            // Nearest representative of S + 2 pi Z to the previous value.
            const double previous = out.path.back().S;
            S += 2.0 * kPi * std::round((previous - S) / (2.0 * kPi));
        }
        out.path.push_back({j, h, S, m.T});
    }
    const auto& first = out.path.front();
    const auto& last = out.path.back();
    // B = [[1, S / 2pi], [0, T / 2pi]]; B_first^{-1} B_last.
    const double a = first.S / (2.0 * kPi);
    const double d = first.T / (2.0 * kPi);
    const double b2 = last.S / (2.0 * kPi);
    const double d2 = last.T / (2.0 * kPi);
    out.transition = {{{1.0, b2 - a * d2 / d}, {0.0, d2 / d}}};
    return out;
}

double poisson_bracket_fd(const PhaseFunction& f, const PhaseFunction& g, const PhasePoint& p) {
    constexpr double kStep = 1e-6;
    const auto gradient = [&](const PhaseFunction& fn) {
        Vec6 grad{};
        const Vec6 base = p.as_array();
        for (std::size_t i = 0; i < 6; ++i) {
            Vec6 plus = base;
            Vec6 minus = base;
            plus[i] += kStep;
            minus[i] -= kStep;
            grad[i] = (fn(PhasePoint::from_array(plus)) - fn(PhasePoint::from_array(minus))) / (2.0 * kStep);
        }
        return grad;
    };
    // Canonical bracket {a, b} = sum a_q b_p - a_p b_q on gradient vectors.
    const auto canonical = [](const Vec6& a, const Vec6& b) {
        double s = 0.0;
        for (std::size_t i = 0; i < 3; ++i) {
            s += a[i] * b[i + 3] - a[i + 3] * b[i];
        }
        return s;
    };
    const Vec6 df = gradient(f);
    const Vec6 dg = gradient(g);
    // Constraints c1 = |q|^2 - 1, c2 = q . p.
    const Vec6 dc1{2.0 * p.x, 2.0 * p.y, 2.0 * p.z, 0.0, 0.0, 0.0};
    const Vec6 dc2{p.u, p.v, p.w, p.x, p.y, p.z};
    const double c12 = canonical(dc1, dc2);
    const double f1 = canonical(df, dc1);
    const double f2 = canonical(df, dc2);
    const double g1 = canonical(dg, dc1);
    const double g2 = canonical(dg, dc2);
    // {f,g}_D = {f,g} - {f,c_a} C^{ab} {c_b,g} with C^{12} = -1/c12, C^{21} = 1/c12.
    return canonical(df, dg) - (f1 * g2 - f2 * g1) / c12;
}

double poisson_bracket_fd(const PhasePoint& p, const Potential& potential) {
    const PhaseFunction angular = [](const PhasePoint& q) { return q.x * q.v - q.y * q.u; };
    const PhaseFunction energy = [&potential](const PhasePoint& q) {
        return 0.5 * (q.u * q.u + q.v * q.v + q.w * q.w) + potential.value(q.z);
    };
    return poisson_bracket_fd(angular, energy, p);
}

double quadrature_elliptic(EllipticKind kind, double gamma, double n, double k) {
    const double k2 = k * k;
    double upper = gamma;
    double characteristic = n;
    switch (kind) {
        case EllipticKind::F:
            characteristic = 0.0;
            break;
        case EllipticKind::K:
            characteristic = 0.0;
            upper = kPi / 2;
            break;
        case EllipticKind::Pi:
            break;
        case EllipticKind::PiComplete:
            upper = kPi / 2;
            break;
    }
    const auto integrand = [&](double t) {
        const double s2 = std::sin(t) * std::sin(t);
        return 1.0 / ((1.0 - characteristic * s2) * std::sqrt(1.0 - k2 * s2));
    };
    double error = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, 0.0, upper, 15, 1e-12, &error);
    if (!std::isfinite(value) || error > 1e-11 * std::max(1.0, std::abs(value))) {
        throw QuadratureFailure("oracle: elliptic quadrature did not converge (error " +
                                std::to_string(error) + ")");
    }
    return value;
}

}  // namespace spdlm::oracle
