#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <gtest/gtest.h>

#include "../support/test_support.hpp"
#include "spdlm/dynamics_quadratic.hpp"
#include "spdlm/elliptic.hpp"
#include "spdlm/errors.hpp"
#include "spdlm/oracle.hpp"

using namespace spdlm;
using Big = boost::multiprecision::cpp_bin_float_50;

namespace {

constexpr double kPi = std::numbers::pi;

struct BigParams {
    Big parameter;
    Big kc2;
    Big one_minus_z_minus;
    Big ell;
};

// Textbook formulas evaluated at 50 digits, where cancellation does not matter.
BigParams big_params(double j_in, double h_in) {
    const Big j = j_in;
    const Big h = h_in;
    const Big d = sqrt((1 - h) * (1 - h) + 2 * j * j);
    const Big zm = (1 + h - d) / 2;
    const Big zp = (1 + h + d) / 2;
    return {zm / zp, 1 - zm / zp, 1 - zm, sqrt(2 * h - j * j)};
}

double rel(double a, const Big& b) {
    if (b == 0) {
        return std::abs(a);  // 1 - Z- vanishes exactly on fibers over the poles
    }
    return static_cast<double>(abs((Big(a) - b) / b));
}

}  // namespace

TEST(FiberParams, ZeroMomentumBelowSeparatrix) {
    for (double h : {0.1, 0.5, 0.9}) {
        const QuadraticFiberParams q = fiber_params(0.0, h);
        EXPECT_NEAR(q.parameter, h, 1e-15);
        EXPECT_NEAR(q.ell, std::sqrt(2 * h), 1e-15);
    }
}

TEST(FiberParams, NonRegularThrows) {
    EXPECT_THROW((void)fiber_params(0.0, 1.0), StratumError);
    EXPECT_THROW((void)fiber_params(1.0, 0.5), StratumError);
    EXPECT_THROW((void)fiber_params(0.0, -1.0), StratumError);
}

TEST(FiberParams, ReferenceFiber) {
    // 30-digit values for (0.5, 1.0).
    const QuadraticFiberParams q = fiber_params(0.5, 1.0);
    EXPECT_NEAR(q.parameter, 0.477592250072517114970, 1e-15);
    EXPECT_NEAR(q.ell, 1.32287565553229529525, 1e-15);
    EXPECT_NEAR(q.n, q.modulus * q.ell / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(q.z_minus * q.z_plus, 0.5 * q.ell * q.ell, 1e-15);
}

// The stabilised forms keep full relative accuracy in 1 - k and 1 - Z-, also
// right next to the focus-focus value.
TEST(FiberParams, HighPrecisionAgreement) {
    const std::pair<double, double> fibers[] = {{0.5, 1.0},   {1e-4, 1.0},        {1e-7, 1.0 + 1e-7}, {-3e-6, 1.0 - 2e-6},
                                                {0.0, 1.001}, {1e-8, 1.0 - 1e-9}, {0.9, 1.7},         {-0.2, 0.05}};
    for (const auto& [j, h] : fibers) {
        const QuadraticFiberParams q = fiber_params(j, h);
        const BigParams b = big_params(j, h);
        EXPECT_LE(rel(q.parameter, b.parameter), 1e-14) << j << " " << h;
        EXPECT_LE(rel(q.kc2, b.kc2), 1e-13) << j << " " << h;
        EXPECT_LE(rel(q.one_minus_z_minus, b.one_minus_z_minus), 1e-13) << j << " " << h;
        EXPECT_LE(rel(q.ell, b.ell), 1e-15) << j << " " << h;
    }
}

TEST(REpsClosed, ZeroTimeAndQuarterPeriod) {
    const QuadraticFiberParams q = fiber_params(0.4, 1.2);
    EXPECT_NEAR(R_eps_closed(0.0, 0.93, q, 1), 0.93, 1e-15);
    const double t1 = q.time_scale * elliptic::ellint_K_kc(q.kc2);
    const double rho_min = std::sqrt(q.one_minus_z_minus);
    EXPECT_NEAR(R_eps_closed(t1, 1.0, q, -1), rho_min, 1e-12);
    // Minimum of the band: nearby times give larger radii.
    EXPECT_GT(R_eps_closed(t1 * 0.99, 1.0, q, -1), rho_min);
    EXPECT_GT(R_eps_closed(t1 * 1.01, 1.0, q, -1), rho_min);
    EXPECT_THROW((void)R_eps_closed(0.1, 0.1, q, 1), DomainError);
    EXPECT_THROW((void)R_eps_closed(0.1, 0.9, q, 2), std::invalid_argument);
}

TEST(REpsClosed, SmoothThroughTurningPoint) {
    const QuadraticFiberParams q = fiber_params(0.4, 1.2);
    const double t1 = q.time_scale * elliptic::ellint_K_kc(q.kc2);
    const double step = 1e-5;
    // Left and right difference quotients at the turning time both vanish.
    const double left = (R_eps_closed(t1, 1.0, q, -1) - R_eps_closed(t1 - step, 1.0, q, -1)) / step;
    const double right = (R_eps_closed(t1 + step, 1.0, q, -1) - R_eps_closed(t1, 1.0, q, -1)) / step;
    EXPECT_NEAR(left, 0.0, 1e-4);
    EXPECT_NEAR(right, 0.0, 1e-4);
    EXPECT_NEAR(left, right, 1e-4);
    // Away from it the slope is -sqrt((1 - rho^2)(2 rho^2 (h - V) - j^2)) / rho.
    const double t = 0.3 * t1;
    const double rho = R_eps_closed(t, 1.0, q, -1);
    const double fd = (R_eps_closed(t + step, 1.0, q, -1) - R_eps_closed(t - step, 1.0, q, -1)) / (2 * step);
    const double z2 = 1.0 - rho * rho;
    const double exact = -std::sqrt(z2 * (2 * rho * rho * (q.h - z2) - q.j * q.j)) / rho;
    EXPECT_NEAR(fd, exact, 1e-6);
}

TEST(QuadraticFlow, SubstitutionIdentity) {
    const QuadraticFiberParams q = fiber_params(-0.3, 0.7);
    for (double t = 0.0; t < 20.0; t += 0.37) {
        const double rho = R_eps_closed(t, 1.0, q, -1);
        const double gamma = elliptic::jacobi_am_kc(t / q.time_scale, q.kc2);
        const double s = std::sin(gamma);
        EXPECT_NEAR((1 - rho * rho) / q.z_minus, s * s, 1e-11);
    }
}

TEST(JointFlowQuadratic, TrivialCases) {
    const ChartPoint c = to_chart(joint_flow_quadratic(section_point(0.3, 0.9), 0.2, 0.7), Chart::North);
    const PhasePoint p = from_chart(c);
    EXPECT_EQ(distance(joint_flow_quadratic(c, 0.0, 0.0), p), 0.0);
    const PhasePoint r = joint_flow_quadratic(c, 0.9, 0.0);
    EXPECT_NEAR(r.x, std::cos(0.9) * p.x - std::sin(0.9) * p.y, 1e-15);
    EXPECT_NEAR(r.v, std::sin(0.9) * p.u + std::cos(0.9) * p.v, 1e-15);
    EXPECT_EQ(r.z, p.z);
}

TEST(JointFlowQuadratic, MatchesOracle) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        const auto [j, h] = test_support::random_regular(rng, 0.01);
        const PhasePoint p = test_support::random_point_on_fiber(rng, j, h);
        const double t = period_generators(j, h).T * unit(rng);
        EXPECT_LE(distance(joint_flow_quadratic(p, 0.0, t), oracle::integrate_reference(p, Potential::quadratic(), t)),
                  1e-7)
            << j << " " << h;
    }
}

TEST(JointFlowQuadratic, PoleCrossingFiber) {
    // j = 0, h > 1: the pendulum swings over both poles.
    const double h = 1.4;
    const PhasePoint p = section_point(0.0, h);
    for (double t : {0.5, 1.3, 2.2, 4.0}) {
        const PhasePoint a = joint_flow_quadratic(p, 0.0, t);
        EXPECT_LE(distance(a, oracle::integrate_reference(p, Potential::quadratic(), t)), 1e-7);
        EXPECT_NEAR(momentum_map(a, Potential::quadratic()).h, h, 1e-12);
    }
    // Straight through the pole.
    const PhasePoint over = joint_flow_quadratic({0, 0, 1, std::sqrt(2 * (h - 1)), 0, 0}, 0.0, 0.3);
    EXPECT_LE(distance(over, oracle::integrate_reference({0, 0, 1, std::sqrt(2 * (h - 1)), 0, 0},
                                                         Potential::quadratic(), 0.3)),
              1e-7);
}

TEST(JointFlowQuadratic, ConservesOverFivePeriods) {
    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const auto [j, h] = test_support::random_regular(rng);
        const double T = period_generators(j, h).T;
        const PhasePoint p = joint_flow_quadratic(section_point(j, h), 3.0 * unit(rng), 5.0 * T * unit(rng));
        const MomentumValue m = momentum_map(p, Potential::quadratic());
        EXPECT_NEAR(m.j, j, 1e-9);
        EXPECT_NEAR(m.h, h, 1e-9);
        EXPECT_LE(constraint_residual(p), 1e-12);
    }
}

TEST(SectionTrajectory, StartAndQuarterPeriod) {
    for (auto [j, h] : {std::pair{0.4, 1.2}, std::pair{-0.7, 0.5}, std::pair{0.0, 0.6}}) {
        const auto [rho0, theta0] = section_trajectory(j, h, 0.0);
        EXPECT_EQ(rho0, 1.0);
        EXPECT_EQ(theta0, 0.0);
        const QuadraticFiberParams q = fiber_params(j, h);
        const double t1 = q.time_scale * elliptic::ellint_K_kc(q.kc2);
        const double d = std::sqrt((1 - h) * (1 - h) + 2 * j * j);
        EXPECT_NEAR(section_trajectory(j, h, t1).first, std::sqrt((1 - h + d) / 2), 1e-12);
    }
}

TEST(SectionTrajectory, AzimuthMatchesQuadratureFlow) {
    const Potential v = Potential::quadratic();
    for (auto [j, h] : {std::pair{0.4, 1.2}, std::pair{-0.7, 0.5}}) {
        const FlowState s = make_flow_state(section_point(j, h), v);
        for (double t : {0.4, 1.9, 3.3}) {
            const auto [rho, theta] = section_trajectory(j, h, t);
            const PhasePoint p = flow_H(s, t, v).point;
            EXPECT_NEAR(rho, std::hypot(p.x, p.y), 1e-9);
            EXPECT_NEAR(std::remainder(theta - std::atan2(p.y, p.x), 2 * kPi), 0.0, 1e-9);
        }
    }
}

TEST(SectionTrajectory, PoleFiberTurnsByPi) {
    const auto [rho, theta] = section_trajectory(0.0, 1.5, 1.0);
    const PhasePoint p = joint_flow_quadratic(section_point(0.0, 1.5), 0.0, 1.0);
    EXPECT_NEAR(rho, std::hypot(p.x, p.y), 1e-12);
    if (rho > 1e-6) {
        EXPECT_NEAR(std::remainder(theta - std::atan2(p.y, p.x), 2 * kPi), 0.0, 1e-12);
    }
}

TEST(EtaClosedForm, MatchesFiberRelation) {
    for (auto [j, h] : {std::pair{0.4, 1.2}, std::pair{-0.2, 0.3}, std::pair{0.9, 1.8}}) {
        const QuadraticFiberParams q = fiber_params(j, h);
        for (double gamma = -3.0; gamma < 3.0; gamma += 0.25) {
            const double z2 = q.z_minus * std::sin(gamma) * std::sin(gamma);
            const double from_fiber = std::sqrt(j * j + 2 * z2 * (h - z2));
            EXPECT_NEAR(eta_closed_form(q, gamma), from_fiber, 1e-12);
        }
    }
}

// The arcsin display for phi holds on arcs with eps = -1 in the north chart.
TEST(PhiArcsinForm, HoldsOnPrincipalBranch) {
    const double j = 0.4;
    const double h = 1.2;
    const PhasePoint start = joint_flow_quadratic(section_point(j, h), 0.3, 0.2);
    ASSERT_GT(start.z, 0.0);
    ASSERT_GT(start.w, 0.0);
    const ChartPoint c0 = to_chart(start, Chart::North);
    for (double t : {0.05, 0.1, 0.2}) {
        const PhasePoint p = joint_flow_quadratic(start, 0.0, t);
        ASSERT_GT(p.w, 0.0);
        const ChartPoint c = to_chart(p, Chart::North);
        const double phi = phi_arcsin_form(c0, c.coords[0], c.coords[1], c0.theta() + std::remainder(c.theta() - c0.theta(), 2 * kPi));
        EXPECT_NEAR(std::remainder(phi - c.phi(), 2 * kPi), 0.0, 1e-10);
    }
}

TEST(QuadraticCsv, HeaderHasEllipticColumns) {
    const std::vector<double> times{0.0, 1.0};
    const std::vector<PhasePoint> points = flow_quadratic_samples(section_point(0.4, 1.2), times);
    std::ostringstream out;
    write_quadratic_trajectory_csv(out, times, points);
    EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "t,x,y,z,u,v,w,j,h,k,ell,gamma");
    EXPECT_EQ(distance(points[0], section_point(0.4, 1.2)), 0.0);
}
