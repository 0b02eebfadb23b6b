#pragma once

#include <stdexcept>
#include <string>

namespace spdlm {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a special function (pole, k >= 1, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Raw 6-vector whose position part is (numerically) zero.
class DegenerateInput : public Error {
public:
    using Error::Error;
};

/// Point outside the chart, or a chart formula evaluated on its singular locus.
class ChartDomainError : public Error {
public:
    using Error::Error;
};

/// Operation requires a regular fiber but got a boundary, focus-focus or outside value.
class StratumError : public Error {
public:
    using Error::Error;
};

/// Single-branch solve asked to run past a turning point.
class BranchExhausted : public Error {
public:
    using Error::Error;
};

/// Initial radius not in the classically allowed band of the fiber.
class OutsideFiber : public Error {
public:
    using Error::Error;
};

/// Fiber lies within the guard band of the boundary or focus-focus stratum.
class NearSingularFiber : public Error {
public:
    using Error::Error;
};

class QuadratureFailure : public Error {
public:
    using Error::Error;
};

/// Adaptive integrator could not meet its tolerance.
class StepFailure : public Error {
public:
    using Error::Error;
};

/// Return map found no crossing of the Poincare section.
class SectionMissed : public Error {
public:
    using Error::Error;
};

}  // namespace spdlm
