#include <benchmark/benchmark.h>

#include "spdlm/action_angle.hpp"
#include "spdlm/dynamics_general.hpp"
#include "spdlm/dynamics_quadratic.hpp"
#include "spdlm/elliptic.hpp"
#include "spdlm/oracle.hpp"

using namespace spdlm;

namespace {

void BM_EllipticF(benchmark::State& state) {
    double g = 0.3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(elliptic::ellint_F(g, 0.8));
        g = g < 1.4 ? g + 1e-3 : 0.3;
    }
}
BENCHMARK(BM_EllipticF);

void BM_EllipticPi(benchmark::State& state) {
    double g = 0.3;
    for (auto _ : state) {
        benchmark::DoNotOptimize(elliptic::ellint_Pi(g, 0.4, 0.8));
        g = g < 1.4 ? g + 1e-3 : 0.3;
    }
}
BENCHMARK(BM_EllipticPi);

void BM_JacobiAm(benchmark::State& state) {
    double f = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(elliptic::jacobi_am(f, 0.9));
        f = f < 10.0 ? f + 1e-2 : 0.1;
    }
}
BENCHMARK(BM_JacobiAm);

void BM_ClosedFormFlow(benchmark::State& state) {
    const PhasePoint p = section_point(0.4, 1.2);
    double t = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(joint_flow_quadratic(p, 0.3, t));
        t = t < 50.0 ? t + 0.37 : 0.0;
    }
}
BENCHMARK(BM_ClosedFormFlow);

void BM_QuadratureFlow(benchmark::State& state) {
    const Potential v = Potential::quadratic();
    const FlowState s0 = make_flow_state(section_point(0.4, 1.2), v);
    double t = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(flow_H(s0, t, v));
        t = t < 50.0 ? t + 0.37 : 0.0;
    }
}
BENCHMARK(BM_QuadratureFlow);

void BM_ReferenceIntegrator(benchmark::State& state) {
    const PhasePoint p = section_point(0.4, 1.2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(oracle::integrate_reference(p, Potential::quadratic(), 10.0));
    }
}
BENCHMARK(BM_ReferenceIntegrator);

void BM_ActionA2(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(action_A2(0.4, 1.2));
    }
}
BENCHMARK(BM_ActionA2);

void BM_Angles(benchmark::State& state) {
    const PhasePoint p = joint_flow_quadratic(section_point(0.4, 1.2), 1.0, 2.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(angles(p));
    }
}
BENCHMARK(BM_Angles);

}  // namespace

BENCHMARK_MAIN();
