#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace spdlm::cli {

enum ExitCode : int { kSuccess = 0, kVerificationFailed = 1, kUsageError = 2 };

/// Everything the subcommands read from the command line.
struct RunSpec {
    std::string subcommand;
    bool quadratic = false;
    std::string potential;
    std::string dpotential;
    std::optional<double> j;
    std::optional<double> h;
    std::string x0;
    double t_max = 10.0;
    std::optional<int> samples;
    std::uint64_t seed = 42;
    double tol = 1e-6;
    bool audit_formulas = false;
    std::string out = "-";
    std::string format = "csv";
};

/// Parses argv and runs the subcommand. Normal output goes to `out` when no
/// --out file is given; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Runs an already parsed spec.
int execute(const RunSpec& spec, std::ostream& out, std::ostream& err);

}  // namespace spdlm::cli
