#include "spdlm_cli/commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "spdlm/action_angle.hpp"
#include "spdlm/dynamics_general.hpp"
#include "spdlm/dynamics_quadratic.hpp"
#include "spdlm/errors.hpp"
#include "spdlm/io.hpp"
#include "spdlm/oracle.hpp"
#include "spdlm/report.hpp"
#include "spdlm_cli/expression.hpp"
#include "spdlm_cli/svg.hpp"

namespace spdlm::cli {

namespace {

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

using Fiber = std::pair<double, double>;

// Runs fn(i) for i in [0, n) on a few threads; results stay in index order.
template <class T>
std::vector<T> parallel_map(std::size_t n, const std::function<T(std::size_t)>& fn) {
    std::vector<T> out(n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    const unsigned workers = std::max(1U, std::min<unsigned>(std::thread::hardware_concurrency(), 16U));
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    out[i] = fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return out;
}

Potential make_potential(const RunSpec& spec) {
    if (spec.quadratic || (spec.potential.empty() && spec.dpotential.empty())) {
        return Potential::quadratic();
    }
    if (spec.potential.empty() || spec.dpotential.empty()) {
        throw UsageError("--potential and --dpotential must be given together");
    }
    Potential p("V(z) = " + spec.potential, parse_expression(spec.potential), parse_expression(spec.dpotential));
    if (auto why = admissibility_violation(p)) {
        throw UsageError("potential is not admissible: " + *why);
    }
    return p;
}

void require_inside(double j, double h) {
    if (classify(j, h) == Stratum::Outside) {
        throw UsageError("outside momentum image: (j, h) = (" + io::format_real(j) + ", " + io::format_real(h) + ")");
    }
}

void write_output(const RunSpec& spec, const std::string& content, std::ostream& out) {
    if (spec.out.empty() || spec.out == "-") {
        out << content;
        return;
    }
    std::ofstream file(spec.out, std::ios::binary);
    if (!file) {
        throw UsageError("cannot open " + spec.out + " for writing");
    }
    file << content;
    if (!file) {
        throw UsageError("failed writing " + spec.out);
    }
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(std::max(n, 1)));
    if (n <= 1) {
        out.push_back(a);
        return out;
    }
    for (int i = 0; i < n; ++i) {
        out.push_back(i == n - 1 ? b : a + (b - a) * i / (n - 1));
    }
    return out;
}

std::vector<Fiber> requested_fibers(const RunSpec& spec, const std::vector<Fiber>& fallback) {
    if (spec.j.has_value() != spec.h.has_value()) {
        throw UsageError("--j and --h must be given together");
    }
    if (spec.j) {
        require_inside(*spec.j, *spec.h);
        return {{*spec.j, *spec.h}};
    }
    return fallback;
}

// Grid over the image that keeps away from the boundary and from (0, 1).
std::vector<Fiber> actions_grid(int n) {
    std::vector<Fiber> out;
    for (double j : linspace(-1.0, 1.0, n)) {
        for (double h : linspace(0.5 * j * j + 0.05, 2.0, n)) {
            if (std::hypot(j, h - 1.0) > 1e-3) {
                out.emplace_back(j, h);
            }
        }
    }
    return out;
}

// Period T over a regular (j, h) grid, blank outside the regular stratum.
std::string period_map(const Potential& potential, int n, const std::string& title) {
    const double j_min = -1.5;
    const double j_max = 1.5;
    const double h_max = 2.0;
    const std::vector<double> js = linspace(j_min, j_max, n);
    const std::vector<double> hs = linspace(0.0, h_max, n);
    std::vector<Fiber> fibers;
    for (double h : hs) {
        for (double j : js) {
            fibers.emplace_back(j, h);
        }
    }
    const std::vector<HeatCell> cells = parallel_map<HeatCell>(fibers.size(), [&](std::size_t i) {
        const auto [j, h] = fibers[i];
        HeatCell c{j, h, std::nan("")};
        if (classify(j, h) != Stratum::Regular || std::hypot(j, h - 1.0) < 1e-3) {
            return c;
        }
        try {
            c.value = potential.is_quadratic() ? period_generators(j, h).T : FiberGeometry(j, h, potential).period();
        } catch (const Error&) {
        }
        return c;
    });
    return momentum_image_svg(cells, js[1] - js[0], hs[1] - hs[0], j_min, j_max, h_max, title);
}

std::string trajectory_json(std::span<const double> times, std::span<const PhasePoint> points,
                            const Potential& potential) {
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < points.size(); ++i) {
        const PhasePoint& p = points[i];
        const MomentumValue m = momentum_map(p, potential);
        rows.push_back({{"t", times[i]}, {"x", p.x}, {"y", p.y}, {"z", p.z}, {"u", p.u}, {"v", p.v}, {"w", p.w},
                        {"j", m.j}, {"h", m.h}});
    }
    return rows.dump(2) + "\n";
}

int cmd_trajectory(const RunSpec& spec, std::ostream& out) {
    const Potential potential = make_potential(spec);
    PhasePoint start;
    if (!spec.x0.empty()) {
        if (spec.j || spec.h) {
            throw UsageError("give either --x0 or --j/--h, not both");
        }
        const std::vector<std::string> fields = io::split_csv(spec.x0);
        if (fields.size() != 6) {
            throw UsageError("--x0 needs 6 comma-separated reals");
        }
        Vec6 raw{};
        for (std::size_t i = 0; i < 6; ++i) {
            try {
                raw[i] = std::stod(fields[i]);
            } catch (const std::exception&) {
                throw UsageError("--x0: cannot read '" + fields[i] + "'");
            }
        }
        start = project(raw);
        const MomentumValue m = momentum_map(start, potential);
        require_inside(m.j, m.h);
    } else {
        const double j = spec.j.value_or(0.4);
        const double h = spec.h.value_or(1.2);
        require_inside(j, h);
        start = section_point(j, h);
    }

    const int n = spec.t_max == 0.0 ? 1 : spec.samples.value_or(201);
    if (n < 1) {
        throw UsageError("--samples must be positive");
    }
    const std::vector<double> times = linspace(0.0, spec.t_max, n);
    std::vector<PhasePoint> points;
    if (potential.is_quadratic()) {
        points = flow_quadratic_samples(start, times);
    } else {
        const std::vector<FlowState> states = flow_H_samples(make_flow_state(start, potential), times, potential);
        points.reserve(states.size());
        for (const FlowState& s : states) {
            points.push_back(s.point);
        }
    }

    std::ostringstream text;
    if (spec.format == "svg") {
        const MomentumValue m = momentum_map(start, potential);
        text << trajectory_svg(times, points,
                               potential.name() + ", j = " + io::format_real(m.j) + ", h = " + io::format_real(m.h));
    } else if (spec.format == "json") {
        text << trajectory_json(times, points, potential);
    } else if (potential.is_quadratic()) {
        write_quadratic_trajectory_csv(text, times, points);
    } else {
        write_trajectory_csv(text, times, points, potential);
    }
    write_output(spec, text.str(), out);
    return kSuccess;
}

int cmd_actions(const RunSpec& spec, std::ostream& out) {
    const Potential potential = make_potential(spec);
    if (!potential.is_quadratic()) {
        throw UsageError("actions: closed-form actions exist for the quadratic potential only");
    }
    if (spec.format == "svg") {
        if (spec.j || spec.h) {
            throw UsageError("actions --format svg draws the whole image; drop --j/--h");
        }
        write_output(spec, period_map(potential, spec.samples.value_or(41), "period T over the momentum image"), out);
        return kSuccess;
    }
    const std::vector<Fiber> fibers = requested_fibers(spec, actions_grid(spec.samples.value_or(9)));
    const std::vector<ActionsRow> rows = parallel_map<ActionsRow>(fibers.size(), [&](std::size_t i) {
        return actions_row(fibers[i].first, fibers[i].second);
    });
    std::ostringstream text;
    if (spec.format == "json") {
        const auto field = [](const std::optional<double>& v) {
            return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
        };
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const ActionsRow& r : rows) {
            arr.push_back({{"j", r.j}, {"h", r.h}, {"k", field(r.k)}, {"ell", field(r.ell)},
                           {"S_formula", field(r.S_formula)}, {"T_formula", field(r.T_formula)},
                           {"S_oracle", field(r.S_oracle)}, {"T_oracle", field(r.T_oracle)}, {"A2", field(r.A2)},
                           {"discrepancy_flag", r.discrepancy}});
        }
        text << arr.dump(2) << "\n";
    } else {
        write_actions_csv(text, rows);
    }
    write_output(spec, text.str(), out);
    return kSuccess;
}

struct PeriodsRow {
    double j = 0.0;
    double h = 0.0;
    double S = 0.0;
    double T = 0.0;
    double S_oracle = 0.0;
    double T_oracle = 0.0;
    std::optional<AlternativePeriods> alternatives;
};

int cmd_periods(const RunSpec& spec, std::ostream& out) {
    const Potential potential = make_potential(spec);
    const std::vector<Fiber> fibers = requested_fibers(spec, oracle::default_verify_grid());
    for (const auto& [j, h] : fibers) {
        if (classify(j, h) != Stratum::Regular) {
            throw StratumError("periods: (" + io::format_real(j) + ", " + io::format_real(h) + ") is " +
                               std::string(to_string(classify(j, h))) + ", periods need a regular fiber");
        }
    }
    const std::vector<PeriodsRow> rows = parallel_map<PeriodsRow>(fibers.size(), [&](std::size_t i) {
        const auto [j, h] = fibers[i];
        PeriodsRow r;
        r.j = j;
        r.h = h;
        if (potential.is_quadratic()) {
            const PeriodLattice lattice = period_generators(j, h);
            r.S = lattice.S;
            r.T = lattice.T;
            r.alternatives = alternative_period_formulas(j, h);
        } else {
            const FiberGeometry g(j, h, potential);
            r.T = g.period();
            r.S = -g.azimuth_per_period();
        }
        const oracle::MeasuredPeriods m = oracle::measure_period(j, h, potential);
        r.S_oracle = m.S;
        r.T_oracle = m.T;
        return r;
    });

    std::ostringstream text;
    const auto opt = [](const std::optional<AlternativePeriods>& a, auto member) -> std::optional<double> {
        if (!a) {
            return std::nullopt;
        }
        return member(*a);
    };
    const auto t_general = [](const AlternativePeriods& a) -> std::optional<double> { return a.T_general; };
    const auto s_general = [](const AlternativePeriods& a) -> std::optional<double> { return a.S_general; };
    const auto t_special = [](const AlternativePeriods& a) -> std::optional<double> { return a.T_special; };
    if (spec.format == "json") {
        const auto field = [](const std::optional<double>& v) {
            return v && std::isfinite(*v) ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
        };
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const PeriodsRow& r : rows) {
            arr.push_back({{"j", r.j}, {"h", r.h}, {"S", r.S}, {"T", r.T}, {"S_oracle", r.S_oracle},
                           {"T_oracle", r.T_oracle},
                           {"T_general_formula", field(opt(r.alternatives, t_general))},
                           {"S_general_formula", field(opt(r.alternatives, s_general))},
                           {"T_special_formula", field(opt(r.alternatives, t_special))}});
        }
        text << arr.dump(2) << "\n";
    } else {
        const auto field = [](const std::optional<double>& v) {
            return v && std::isfinite(*v) ? io::format_real(*v) : std::string();
        };
        text << "j,h,S,T,S_oracle,T_oracle,T_general_formula,S_general_formula,T_special_formula\n";
        for (const PeriodsRow& r : rows) {
            text << io::join_csv({io::format_real(r.j), io::format_real(r.h), io::format_real(r.S),
                                  io::format_real(r.T), io::format_real(r.S_oracle), io::format_real(r.T_oracle),
                                  field(opt(r.alternatives, t_general)), field(opt(r.alternatives, s_general)),
                                  field(opt(r.alternatives, t_special))})
                 << '\n';
        }
    }
    write_output(spec, text.str(), out);
    return kSuccess;
}

int cmd_verify(const RunSpec& spec, std::ostream& out, std::ostream& err) {
    if (!spec.quadratic && (!spec.potential.empty() || !spec.dpotential.empty())) {
        throw UsageError("verify checks the closed forms of the quadratic potential only");
    }
    if (!(spec.tol > 0.0)) {
        throw UsageError("--tol must be positive");
    }
    if (spec.j.has_value() != spec.h.has_value()) {
        throw UsageError("--j and --h must be given together");
    }
    std::vector<Fiber> fibers = oracle::default_verify_grid();
    if (spec.j) {
        fibers = {{*spec.j, *spec.h}};
    }
    oracle::ReportOptions options;
    options.seed = spec.seed;
    options.tol = spec.tol;
    options.audit_formulas = spec.audit_formulas;
    const oracle::VerificationReport report = oracle::build_report(fibers, options);
    write_output(spec, oracle::to_json(report), out);
    if (report.all_pass()) {
        return kSuccess;
    }
    for (const oracle::FiberRecord& r : report.records) {
        if (r.error) {
            err << "FAIL (" << io::format_real(r.j) << ", " << io::format_real(r.h) << "): " << *r.error << "\n";
        }
        for (const oracle::Check& c : r.checks) {
            if (!c.pass && !c.informational) {
                err << "FAIL (" << io::format_real(r.j) << ", " << io::format_real(r.h) << ") " << c.name
                    << ": formula " << io::format_real(c.formula_value) << " vs oracle "
                    << io::format_real(c.oracle_value) << " (rel err " << io::format_real(c.rel_err) << ", tol "
                    << io::format_real(c.tolerance) << ")\n";
            }
        }
    }
    return kVerificationFailed;
}

int cmd_map_image(const RunSpec& spec, std::ostream& out) {
    if (spec.format != "svg" && spec.format != "csv") {
        throw UsageError("map-image writes SVG");
    }
    const Potential potential = make_potential(spec);
    write_output(spec, period_map(potential, spec.samples.value_or(41), "momentum image of " + potential.name()),
                 out);
    return kSuccess;
}

void add_common_options(CLI::App* sub, RunSpec& spec) {
    auto* quad = sub->add_flag("--quadratic", spec.quadratic, "Use V(z) = z^2 (the default)");
    auto* pot = sub->add_option("--potential", spec.potential, "Expression for V(z)");
    auto* dpot = sub->add_option("--dpotential", spec.dpotential, "Expression for V'(z)");
    quad->excludes(pot)->excludes(dpot);
    sub->add_option("--j", spec.j, "Angular momentum value");
    sub->add_option("--h", spec.h, "Energy value");
    sub->add_option("--x0", spec.x0, "Initial point x,y,z,u,v,w (projected onto T*S^2)");
    sub->add_option("--t-max", spec.t_max, "Final time");
    sub->add_option("--samples", spec.samples, "Number of time samples, or grid points per axis");
    sub->add_option("--seed", spec.seed, "Seed for the random check points");
    sub->add_option("--tol", spec.tol, "Relative tolerance of the period checks");
    sub->add_flag("--audit-formulas", spec.audit_formulas,
                  "Count the alternative closed-form periods as checks instead of information");
    sub->add_option("--out", spec.out, "Output file, - for standard output");
    sub->add_option("--format", spec.format, "csv, json or svg")->check(CLI::IsMember({"csv", "json", "svg"}));
}

}  // namespace

int execute(const RunSpec& spec, std::ostream& out, std::ostream& err) {
    try {
        if (spec.subcommand == "trajectory") {
            return cmd_trajectory(spec, out);
        }
        if (spec.subcommand == "actions") {
            return cmd_actions(spec, out);
        }
        if (spec.subcommand == "periods") {
            return cmd_periods(spec, out);
        }
        if (spec.subcommand == "verify") {
            return cmd_verify(spec, out, err);
        }
        if (spec.subcommand == "map-image") {
            return cmd_map_image(spec, out);
        }
        err << "spdlm: unknown subcommand '" << spec.subcommand << "'\n";
        return kUsageError;
    } catch (const std::exception& e) {
        err << "spdlm " << spec.subcommand << ": " << e.what() << "\n";
        return kUsageError;
    }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spherical pendulum flows, periods, actions and verification"};
    app.name("spdlm");
    // -h would clash with --h; subcommands inherit this.
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);
    RunSpec spec;
    const std::vector<std::pair<std::string, std::string>> subcommands{
        {"trajectory", "Sample the flow of H from a start point (CSV, JSON or SVG)"},
        {"actions", "Periods, actions and the oracle comparison over a (j, h) grid"},
        {"periods", "Shipped, alternative and measured periods S and T"},
        {"verify", "Compare the closed forms with the oracle and write a JSON report"},
        {"map-image", "SVG of the momentum image coloured by the period T"},
    };
    for (const auto& [name, help] : subcommands) {
        add_common_options(app.add_subcommand(name, help), spec);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsageError;
    }
    spec.subcommand = app.get_subcommands().front()->get_name();
    return execute(spec, out, err);
}

}  // namespace spdlm::cli
