#pragma once

// Per-fiber comparison of the shipped closed forms (V = z^2) with the oracle.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spdlm/oracle.hpp"
#include "spdlm/phase_space.hpp"

namespace spdlm::oracle {

struct ReportOptions {
    std::uint64_t seed = 42;
    /// Relative tolerance of the period comparisons.
    double tol = 1e-6;
    /// Count the literal alternative period formulas as checks instead of
    /// recording them for information only.
    bool audit_formulas = false;
    /// Run fibers on separate threads. Output order does not depend on it.
    bool parallel = true;
    IntegratorConfig integrator{};
};

struct Check {
    std::string name;
    double formula_value = 0.0;
    double oracle_value = 0.0;
    double abs_err = 0.0;
    double rel_err = 0.0;
    double tolerance = 0.0;
    bool pass = true;
    /// Informational checks never fail a record.
    bool informational = false;
};

struct FiberRecord {
    double j = 0.0;
    double h = 0.0;
    Stratum stratum = Stratum::Regular;
    int lattice_rank = 0;
    std::vector<Check> checks;
    /// Set when a computation threw; the record then fails.
    std::optional<std::string> error;

    [[nodiscard]] bool pass() const;
};

struct Tolerances {
    double period_rel = 1e-6;
    double flow = 1e-7;
    double lattice_return = 1e-6;
    double bracket = 1e-6;
    double action_gradient = 1e-5;
};

struct VerificationReport {
    int schema_version = 1;
    std::uint64_t seed = 0;
    bool audit_formulas = false;
    Tolerances tolerances;
    std::vector<FiberRecord> records;

    [[nodiscard]] bool all_pass() const;
};

[[nodiscard]] VerificationReport build_report(const std::vector<std::pair<double, double>>& fibers,
                                              const ReportOptions& options = {});

/// Fixed-layout JSON; identical reports give identical text.
[[nodiscard]] std::string to_json(const VerificationReport& report);

/// The 5 x 5 grid used when no fibers are given: j in {-0.8, -0.4, 0, 0.4, 0.8},
/// h = j^2 / 2 + 0.15 + 0.35 i.
[[nodiscard]] std::vector<std::pair<double, double>> default_verify_grid();

}  // namespace spdlm::oracle
