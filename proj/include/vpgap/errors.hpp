#pragma once

#include <stdexcept>
#include <string>

namespace vpgap {

/// invalid input parameters (CLI exit code 2)
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// argument outside the domain of an operation, e.g. r outside [r_-, r_+]
struct DomainError : ParameterError {
    using ParameterError::ParameterError;
};

/// (E, L) does not correspond to a bound non-circular orbit
struct NoOrbitError : DomainError {
    using DomainError::DomainError;
};

/// numerical solver did not converge (CLI exit code 3)
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// quadrature or series did not reach the requested tolerance
struct AccuracyError : SolverError {
    AccuracyError(const std::string& what, double estimate, double bound)
        : SolverError(what), estimate(estimate), bound(bound) {}
    double estimate;
    double bound;
};

/// discretization cannot represent the problem, e.g. a singular metric
struct DiscretizationError : SolverError {
    using SolverError::SolverError;
};

}  // namespace vpgap
