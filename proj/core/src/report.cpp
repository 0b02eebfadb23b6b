#include "spdlm/report.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <future>
#include <numbers>
#include <random>

#include <json.hpp>

#include "spdlm/action_angle.hpp"
#include "spdlm/dynamics_quadratic.hpp"

namespace spdlm::oracle {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kGradientStep = 1e-4;

Check value_check(std::string name, double formula, double oracle, double tolerance, bool relative) {
    Check c;
    c.name = std::move(name);
    c.formula_value = formula;
    c.oracle_value = oracle;
    c.abs_err = std::abs(formula - oracle);
    c.rel_err = oracle != 0.0 ? c.abs_err / std::abs(oracle) : c.abs_err;
    c.tolerance = tolerance;
    c.pass = (relative ? c.rel_err : c.abs_err) <= tolerance;
    return c;
}

// Angles compared modulo 2 pi; the tolerance scales with |S| like a relative one.
Check angle_check(std::string name, double formula, double oracle, double rel_tol) {
    Check c;
    c.name = std::move(name);
    c.formula_value = formula;
    c.oracle_value = oracle;
    c.abs_err = std::abs(angle_difference(formula, oracle));
    c.rel_err = c.abs_err / std::max(1.0, std::abs(oracle));
    c.tolerance = rel_tol;
    c.pass = c.rel_err <= rel_tol;
    return c;
}

Check distance_check(std::string name, double dist, double tolerance) {
    return value_check(std::move(name), dist, 0.0, tolerance, false);
}

Check informational(Check c, bool audit) {
    c.informational = !audit;
    return c;
}

void regular_checks(FiberRecord& rec, const ReportOptions& opt, const Tolerances& tol) {
    const double j = rec.j;
    const double h = rec.h;
    const Potential quadratic = Potential::quadratic();
    const PeriodLattice lattice = period_generators(j, h);
    rec.lattice_rank = lattice.rank;
    const MeasuredPeriods measured = measure_period(j, h, quadratic, opt.integrator);

    rec.checks.push_back(value_check("T", lattice.T, measured.T, tol.period_rel, true));
    rec.checks.push_back(angle_check("S", lattice.S, measured.S, tol.period_rel));

    const AlternativePeriods alt = alternative_period_formulas(j, h);
    rec.checks.push_back(
        informational(value_check("T_general_formula", alt.T_general, measured.T, tol.period_rel, true), opt.audit_formulas));
    if (j != 0.0) {
        rec.checks.push_back(
            informational(angle_check("S_general_formula", alt.S_general, measured.S, tol.period_rel), opt.audit_formulas));
    }
    if (alt.T_special) {
        rec.checks.push_back(informational(
            value_check("T_special_formula", *alt.T_special, measured.T, tol.period_rel, true), opt.audit_formulas));
    }

    // A random point of the fiber, reached from the section point.
    const std::uint64_t jb = std::bit_cast<std::uint64_t>(j);
    const std::uint64_t hb = std::bit_cast<std::uint64_t>(h);
    std::seed_seq seeds{opt.seed & 0xffffffffU, opt.seed >> 32, jb & 0xffffffffU, jb >> 32, hb & 0xffffffffU, hb >> 32};
    std::mt19937_64 rng(seeds);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const PhasePoint start =
        joint_flow_quadratic(section_point(j, h), kTwoPi * unit(rng), lattice.T * unit(rng));
    const double t_flow = lattice.T * unit(rng);

    const PhasePoint closed = joint_flow_quadratic(start, 0.0, t_flow);
    const PhasePoint reference = integrate_reference(start, quadratic, t_flow, opt.integrator);
    rec.checks.push_back(distance_check("flow_vs_reference", distance(closed, reference), tol.flow));

    const PhasePoint back = joint_flow_quadratic(start, lattice.S, lattice.T);
    rec.checks.push_back(distance_check("lattice_return", distance(back, start), tol.lattice_return));

    rec.checks.push_back(
        value_check("poisson_bracket", 0.0, poisson_bracket_fd(start, quadratic), tol.bracket, false));

    const double step = kGradientStep;
    const double d_h = (action_A2(j, h + step) - action_A2(j, h - step)) / (2.0 * step);
    rec.checks.push_back(value_check("dA2_dh", lattice.T / kTwoPi, d_h, tol.action_gradient, true));
    // A2 has a kink across j = 0 above the focus-focus value.
    if (!(j == 0.0 && h > 1.0)) {
        const double d_j = (action_A2(j + step, h) - action_A2(j - step, h)) / (2.0 * step);
        rec.checks.push_back(value_check("dA2_dj", lattice.S / kTwoPi, d_j, tol.action_gradient * std::max(1.0, std::abs(d_j)),
                                         false));
    }
}

void boundary_checks(FiberRecord& rec, const Tolerances& tol) {
    rec.lattice_rank = 1;
    // For V = z^2 the boundary fibers are the equatorial circles.
    const PhasePoint p{1.0, 0.0, 0.0, 0.0, rec.j, 0.0};
    rec.checks.push_back(
        value_check("poisson_bracket", 0.0, poisson_bracket_fd(p, Potential::quadratic()), tol.bracket, false));
}

FiberRecord run_fiber(double j, double h, const ReportOptions& opt, const Tolerances& tol) {
    FiberRecord rec;
    rec.j = j;
    rec.h = h;
    rec.stratum = classify(j, h);
    try {
        switch (rec.stratum) {
            case Stratum::Regular:
                regular_checks(rec, opt, tol);
                break;
            case Stratum::EllipticBoundary:
                boundary_checks(rec, tol);
                break;
            case Stratum::FocusFocus:
                rec.error = "focus-focus value: the period T diverges";
                break;
            case Stratum::Outside:
                rec.error = "outside momentum image";
                break;
        }
    } catch (const std::exception& e) {
        rec.error = e.what();
    }
    return rec;
}

nlohmann::ordered_json check_json(const Check& c) {
    nlohmann::ordered_json out;
    out["name"] = c.name;
    out["formula_value"] = c.formula_value;
    out["oracle_value"] = c.oracle_value;
    out["abs_err"] = c.abs_err;
    out["rel_err"] = c.rel_err;
    out["tolerance"] = c.tolerance;
    out["pass"] = c.pass;
    out["informational"] = c.informational;
    return out;
}

}  // namespace

bool FiberRecord::pass() const {
    if (error) {
        return false;
    }
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass || c.informational; });
}

bool VerificationReport::all_pass() const {
    return std::all_of(records.begin(), records.end(), [](const FiberRecord& r) { return r.pass(); });
}

VerificationReport build_report(const std::vector<std::pair<double, double>>& fibers, const ReportOptions& options) {
    VerificationReport report;
    report.seed = options.seed;
    report.audit_formulas = options.audit_formulas;
    report.tolerances.period_rel = options.tol;
    const Tolerances tol = report.tolerances;
    report.records.reserve(fibers.size());
    if (options.parallel) {
        std::vector<std::future<FiberRecord>> pending;
        pending.reserve(fibers.size());
        for (const auto& [j, h] : fibers) {
            pending.push_back(std::async(std::launch::async, [j = j, h = h, &options, tol] {
                return run_fiber(j, h, options, tol);
            }));
        }
        for (auto& f : pending) {
            report.records.push_back(f.get());
        }
    } else {
        for (const auto& [j, h] : fibers) {
            report.records.push_back(run_fiber(j, h, options, tol));
        }
    }
    return report;
}

std::string to_json(const VerificationReport& report) {
    nlohmann::ordered_json out;
    out["schema_version"] = report.schema_version;
    out["seed"] = report.seed;
    out["tolerances"] = {{"period_rel", report.tolerances.period_rel},
                         {"flow", report.tolerances.flow},
                         {"lattice_return", report.tolerances.lattice_return},
                         {"bracket", report.tolerances.bracket},
                         {"action_gradient", report.tolerances.action_gradient}};
    out["audit_formulas"] = report.audit_formulas;
    out["all_pass"] = report.all_pass();
    out["records"] = nlohmann::ordered_json::array();
    for (const FiberRecord& r : report.records) {
        nlohmann::ordered_json rec;
        rec["j"] = r.j;
        rec["h"] = r.h;
        rec["stratum"] = std::string(to_string(r.stratum));
        rec["lattice_rank"] = r.lattice_rank;
        rec["pass"] = r.pass();
        rec["error"] = r.error ? nlohmann::ordered_json(*r.error) : nlohmann::ordered_json(nullptr);
        rec["checks"] = nlohmann::ordered_json::array();
        for (const Check& c : r.checks) {
            rec["checks"].push_back(check_json(c));
        }
        out["records"].push_back(std::move(rec));
    }
    return out.dump(2) + "\n";
}

std::vector<std::pair<double, double>> default_verify_grid() {
    std::vector<std::pair<double, double>> out;
    for (double j : {-0.8, -0.4, 0.0, 0.4, 0.8}) {
        for (int i = 0; i < 5; ++i) {
            out.emplace_back(j, 0.5 * j * j + 0.15 + 0.35 * i);
        }
    }
    return out;
}

}  // namespace spdlm::oracle
