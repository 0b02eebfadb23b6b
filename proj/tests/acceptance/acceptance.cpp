// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../support/test_support.hpp"
#include "spdlm/action_angle.hpp"
#include "spdlm/dynamics_general.hpp"
#include "spdlm/dynamics_quadratic.hpp"
#include "spdlm/elliptic.hpp"
#include "spdlm/oracle.hpp"
#include "spdlm/report.hpp"

using namespace spdlm;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double time_limit;
    std::function<Outcome()> body;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

Outcome elliptic_kernel() {
    using oracle::EllipticKind;
    using oracle::quadrature_elliptic;
    namespace el = elliptic;
    double worst = 0.0;
    double worst_trip = 0.0;
    for (int a = 0; a < 20; ++a) {
        const double gamma = -1.5 + 3.0 * a / 19.0;
        for (int b = 0; b < 20; ++b) {
            const double k = 0.95 * b / 19.0;
            const double n = -0.8 + 0.8 * b / 19.0 + 0.04 * a;
            const double f = quadrature_elliptic(EllipticKind::F, gamma, 0.0, k);
            worst = std::max(worst, std::abs(el::ellint_F(gamma, k) - f));
            worst = std::max(worst, std::abs(el::ellint_Pi(gamma, n, k) - quadrature_elliptic(EllipticKind::Pi, gamma, n, k)));
            worst = std::max(worst, std::abs(el::ellint_K(k) - quadrature_elliptic(EllipticKind::K, 0.0, 0.0, k)));
            worst = std::max(worst, std::abs(el::ellint_Pi_complete(n, k) -
                                             quadrature_elliptic(EllipticKind::PiComplete, 0.0, n, k)));
            // am and sn against the quadrature value of F: am(F(gamma)) = gamma.
            worst = std::max(worst, std::abs(el::jacobi_am(f, k) - gamma));
            worst = std::max(worst, std::abs(el::jacobi_sn(f, k) - std::sin(gamma)));
            worst_trip = std::max(worst_trip, std::abs(el::jacobi_am(el::ellint_F(gamma, k), k) - gamma));
        }
    }
    return {worst <= 1e-10 && worst_trip <= 1e-11,
            "max quadrature err " + fmt(worst) + ", am(F) round trip " + fmt(worst_trip)};
}

Outcome commutation() {
    std::mt19937_64 rng(1001);
    const Potential generic = test_support::lopsided();
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const PhasePoint p = test_support::random_constrained(rng);
        worst = std::max(worst, std::abs(oracle::poisson_bracket_fd(p, Potential::quadratic())));
        worst = std::max(worst, std::abs(oracle::poisson_bracket_fd(p, generic)));
    }
    return {worst <= 1e-6, "max |{J,H}| " + fmt(worst) + " over 100 points, V = z^2 and " + generic.name()};
}

Outcome conservation() {
    std::mt19937_64 rng(1002);
    std::uniform_real_distribution<double> td(-50.0, 50.0);
    const Potential quad = Potential::quadratic();
    const Potential generic = test_support::quartic();
    double worst_closed = 0.0;
    double worst_general = 0.0;
    for (int i = 0; i < 100; ++i) {
        const auto [j, h] = test_support::random_regular(rng);
        const PhasePoint p = test_support::random_point_on_fiber(rng, j, h);
        const FlowState s0 = make_flow_state(test_support::random_point_on_fiber(rng, j, h, generic), generic);
        for (double t : {-50.0, 50.0, td(rng)}) {
            const MomentumValue m = momentum_map(joint_flow_quadratic(p, 0.0, t), quad);
            worst_closed = std::max({worst_closed, std::abs(m.j - j), std::abs(m.h - h)});
            const MomentumValue g = momentum_map(flow_H(s0, t, generic).point, generic);
            worst_general = std::max({worst_general, std::abs(g.j - j), std::abs(g.h - h)});
        }
    }
    return {worst_closed <= 1e-9 && worst_general <= 1e-9,
            "max drift closed form " + fmt(worst_closed) + ", quadrature flow (z^4) " + fmt(worst_general)};
}

Outcome closed_form_vs_oracle() {
    double worst = 0.0;
    for (int a = 0; a < 10; ++a) {
        const double j = -0.9 + 1.8 * a / 9.0;
        const double h_lo = 0.5 * j * j + 0.05;
        for (int b = 0; b < 10; ++b) {
            const double h = h_lo + (1.95 - h_lo) * b / 9.0;
            const PhasePoint start = section_point(j, h);
            const double T = period_generators(j, h).T;
            std::vector<double> times;
            for (int i = 0; i <= 16; ++i) {
                times.push_back(T * i / 16.0);
            }
            const auto reference = oracle::integrate_samples(start, Potential::quadratic(), times);
            const auto closed = flow_quadratic_samples(start, times);
            for (std::size_t i = 0; i < times.size(); ++i) {
                worst = std::max(worst, distance(closed[i], reference[i]));
            }
        }
    }
    return {worst <= 1e-7, "max distance over one period on 10x10 grid " + fmt(worst)};
}

Outcome period_lattice() {
    std::mt19937_64 rng(1003);
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const auto [j, h] = test_support::random_regular(rng);
        const PeriodLattice l = period_generators(j, h);
        const PhasePoint p = test_support::random_point_on_fiber(rng, j, h);
        worst = std::max(worst, distance(joint_flow_quadratic(p, l.S, l.T), p));
        const PhasePoint by_reference =
            joint_flow_quadratic(oracle::integrate_reference(p, Potential::quadratic(), l.T), l.S, 0.0);
        worst = std::max(worst, distance(by_reference, p));
    }
    bool boundary_ok = true;
    double worst_boundary = 0.0;
    for (int i = 0; i < 10; ++i) {
        const double j = i < 5 ? -1.0 + 0.18 * i : 0.1 + 0.18 * (i - 5);
        const double h = 0.5 * j * j;
        const PeriodLattice l = period_generators(j, h);
        boundary_ok = boundary_ok && l.rank == 1 && l.generators.size() == 1;
        // The H orbit is the J orbit run at rate j; a full turn closes it.
        const PhasePoint p{std::cos(0.3 * i), std::sin(0.3 * i), 0, -j * std::sin(0.3 * i), j * std::cos(0.3 * i), 0};
        const double t = kTwoPi / std::abs(j);
        worst_boundary = std::max(worst_boundary, distance(oracle::integrate_reference(p, Potential::quadratic(), t), p));
    }
    return {worst <= 1e-6 && boundary_ok && worst_boundary <= 1e-6,
            "max return error " + fmt(worst) + " on 50 fibers; boundary rank 1 " + (boundary_ok ? "yes" : "no") +
                ", circle closure " + fmt(worst_boundary)};
}

Outcome discrepancy_adjudication() {
    std::ostringstream detail;
    bool ok = true;
    const auto report = oracle::build_report({{0.0, 0.25}, {0.0, 0.5}, {0.0, 0.75}});
    for (const auto& rec : report.records) {
        const auto find = [&](const std::string& name) -> const oracle::Check* {
            for (const auto& c : rec.checks) {
                if (c.name == name) {
                    return &c;
                }
            }
            return nullptr;
        };
        const oracle::Check* shipped = find("T");
        const oracle::Check* general = find("T_general_formula");
        const oracle::Check* special = find("T_special_formula");
        if (shipped == nullptr || general == nullptr || special == nullptr) {
            ok = false;
            detail << "h=" << rec.h << " missing entries; ";
            continue;
        }
        ok = ok && shipped->rel_err <= 1e-6;
        detail << "h=" << rec.h << ": oracle " << fmt(shipped->oracle_value) << " shipped " << fmt(shipped->formula_value)
               << " general " << fmt(general->formula_value) << " special " << fmt(special->formula_value) << "; ";
    }
    const double t_small = oracle::measure_period(0.0, 1e-3, Potential::quadratic()).T;
    const double limit = kPi * std::sqrt(2.0);
    const double rel = std::abs(t_small - limit) / limit;
    ok = ok && rel <= 0.01;
    detail << "T_oracle(h=1e-3) vs pi sqrt 2 rel " << fmt(rel);
    return {ok, detail.str()};
}

Outcome action_gradient() {
    std::mt19937_64 rng(1004);
    const double step = 1e-4;
    double worst = 0.0;
    int count = 0;
    while (count < 20) {
        const auto [j, h] = test_support::random_regular(rng, 0.05);
        if (std::abs(j) < 0.02) {
            continue;
        }
        const PeriodLattice l = period_generators(j, h);
        const double dh = (action_A2(j, h + step) - action_A2(j, h - step)) / (2 * step);
        const double dj = (action_A2(j + step, h) - action_A2(j - step, h)) / (2 * step);
        const double gh = l.T / kTwoPi;
        const double gj = l.S / kTwoPi;
        worst = std::max(worst, std::hypot(dh - gh, dj - gj) / std::hypot(gh, gj));
        ++count;
    }
    return {worst <= 1e-5, "max relative gradient error " + fmt(worst) + " on 20 fibers"};
}

Outcome loop_action_consistency() {
    std::mt19937_64 rng(1005);
    const Potential v = Potential::quadratic();
    std::vector<double> offsets;
    while (offsets.size() < 20) {
        auto [j, h] = test_support::random_regular(rng, 0.05);
        if (h > 1.0 && j < 0.0) {
            j = -j;  // one side of the cut along j = 0, h > 1
        }
        offsets.push_back(oracle::loop_action(j, h, v) - action_A2(j, h));
    }
    const auto [lo, hi] = std::minmax_element(offsets.begin(), offsets.end());
    const double spread = *hi - *lo;
    return {spread <= 1e-5, "spread of loop_action - A2 over 20 fibers " + fmt(spread)};
}

// Least-squares slope and largest residual of y against x.
std::pair<double, double> fit(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double icpt = (sy - slope * sx) / n;
    double residual = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        residual = std::max(residual, std::abs(y[i] - icpt - slope * x[i]));
    }
    return {slope, residual};
}

// Continues a sequence of angles in [0, 2 pi) without jumps.
std::vector<double> unwrap(const std::vector<double>& a) {
    std::vector<double> out{a.front()};
    for (std::size_t i = 1; i < a.size(); ++i) {
        out.push_back(out.back() + angle_difference(a[i], a[i - 1]));
    }
    return out;
}

Outcome angle_linearity() {
    std::mt19937_64 rng(1006);
    double worst_resid = 0.0;
    double worst_slope = 0.0;
    for (int i = 0; i < 10; ++i) {
        const auto [j, h] = test_support::random_regular(rng, 0.05);
        const PeriodLattice l = period_generators(j, h);
        const PhasePoint p = test_support::random_point_on_fiber(rng, j, h);
        std::vector<double> times;
        for (int k = 0; k <= 60; ++k) {
            times.push_back(2.0 * l.T * k / 60.0);
        }
        const auto traj = oracle::integrate_samples(p, Potential::quadratic(), times);
        std::vector<double> a1;
        std::vector<double> a2;
        for (const PhasePoint& q : traj) {
            const auto [x, y] = angles(q);
            a1.push_back(x);
            a2.push_back(y);
        }
        const auto [s2, r2] = fit(times, unwrap(a2));
        const auto [s1, r1] = fit(times, unwrap(a1));
        worst_resid = std::max({worst_resid, r1, r2});
        worst_slope = std::max({worst_slope, std::abs(s2 - kTwoPi / l.T) / (kTwoPi / l.T),
                                std::abs(s1 + l.S / l.T) / std::max(1.0, std::abs(l.S / l.T))});
    }
    return {worst_resid <= 1e-6 && worst_slope <= 1e-6,
            "max residual " + fmt(worst_resid) + ", max slope error " + fmt(worst_slope) + " on 10 trajectories"};
}

Outcome monodromy() {
    const auto c = oracle::continue_lattice_around_focus(0.3, 48, Potential::quadratic());
    double worst = 0.0;
    std::array<std::array<long, 2>, 2> m{};
    for (int r = 0; r < 2; ++r) {
        for (int s = 0; s < 2; ++s) {
            m[r][s] = std::lround(c.transition[r][s]);
            worst = std::max(worst, std::abs(c.transition[r][s] - static_cast<double>(m[r][s])));
        }
    }
    const long det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    const long off = std::max(std::abs(m[0][1]), std::abs(m[1][0]));
    std::ostringstream d;
    d << "matrix [[" << m[0][0] << ", " << m[0][1] << "], [" << m[1][0] << ", " << m[1][1] << "]], det " << det
      << ", max distance to integers " << fmt(worst);
    return {worst <= 1e-3 && det == 1 && off == 2, d.str()};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "elliptic kernel vs quadrature", 10, elliptic_kernel},
        {2, "commutation {J,H} = 0", 5, commutation},
        {3, "flow conservation", 60, conservation},
        {4, "closed form vs reference integrator", 120, closed_form_vs_oracle},
        {5, "period lattice return", 120, period_lattice},
        {6, "period formula adjudication at j = 0", 30, discrepancy_adjudication},
        {7, "action gradient law", 60, action_gradient},
        {8, "loop action consistency", 120, loop_action_consistency},
        {9, "angle linearity", 60, angle_linearity},
        {10, "monodromy around (0, 1)", 180, monodromy},
    };
    int failed = 0;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.body();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs < c.time_limit;
        const bool pass = o.pass && in_time;
        failed += pass ? 0 : 1;
        std::printf("%s criterion %d: %s | %s | %.2f s (limit %.0f s)%s\n", pass ? "PASS" : "FAIL", c.id,
                    c.name.c_str(), o.detail.c_str(), secs, c.time_limit, in_time ? "" : " over time");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
