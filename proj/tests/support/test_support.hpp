#pragma once

// Shared generators and potentials for the test binaries.

#include <cmath>
#include <numbers>
#include <random>
#include <utility>

#include "spdlm/action_angle.hpp"
#include "spdlm/dynamics_general.hpp"
#include "spdlm/dynamics_quadratic.hpp"
#include "spdlm/phase_space.hpp"

namespace spdlm::test_support {

/// V(z) = z^4.
inline Potential quartic() {
    return Potential("z^4", [](double z) { return z * z * z * z; }, [](double z) { return 4.0 * z * z * z; });
}

/// V(z) = z^2 + (z^3 - z^5) / 2: admissible and not even, so the two
/// hemispheres differ.
inline Potential lopsided() {
    return Potential(
        "z^2 + (z^3 - z^5)/2", [](double z) { return z * z + 0.5 * (z * z * z - z * z * z * z * z); },
        [](double z) { return 2.0 * z + 0.5 * (3.0 * z * z - 5.0 * z * z * z * z); });
}

/// (j, h) uniform over a window of the regular stratum, at least `margin` away
/// from the boundary parabola and from (0, 1).
inline std::pair<double, double> random_regular(std::mt19937_64& rng, double margin = 1e-3) {
    std::uniform_real_distribution<double> jd(-0.9, 0.9);
    std::uniform_real_distribution<double> hd(0.0, 1.9);
    for (;;) {
        const double j = jd(rng);
        const double h = hd(rng);
        if (h > 0.5 * j * j + margin && std::hypot(j, h - 1.0) > std::max(margin, 0.05)) {
            return {j, h};
        }
    }
}

/// Uniform point of the fiber of V = z^2 reached from the section point.
inline PhasePoint random_point_on_fiber(std::mt19937_64& rng, double j, double h) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const PeriodLattice lattice = period_generators(j, h);
    return joint_flow_quadratic(section_point(j, h), 2.0 * std::numbers::pi * unit(rng), lattice.T * unit(rng));
}

/// Point of the fiber of an arbitrary potential reached from the section point.
inline PhasePoint random_point_on_fiber(std::mt19937_64& rng, double j, double h, const Potential& v) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const FiberGeometry g(j, h, v);
    const FlowState s0 = make_flow_state(section_point(j, h), v);
    return joint_flow(s0, 2.0 * std::numbers::pi * unit(rng), g.period() * unit(rng), v).point;
}

/// Projection of a random vector of [-1, 1]^6 onto T*S^2.
inline PhasePoint random_constrained(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (;;) {
        const Vec6 raw{d(rng), d(rng), d(rng), d(rng), d(rng), d(rng)};
        if (std::sqrt(raw[0] * raw[0] + raw[1] * raw[1] + raw[2] * raw[2]) > 0.1) {
            return project(raw);
        }
    }
}

}  // namespace spdlm::test_support
