#pragma once

#include <stdexcept>
#include <string>

namespace cggm {

// Base class for all library errors. Subtypes exist so callers can
// distinguish recoverable conditions (per-edge solver failures, bad input
// files) from programming errors without string matching.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A matrix required to be positive definite is not (eigenvalue tolerance 1e-8).
struct NotPositiveDefiniteError : Error {
    using Error::Error;
};

// A cluster of size 1 where the estimator needs at least 2 members.
struct SingletonClusterError : Error {
    using Error::Error;
};

// Input dimensions outside an operation's domain (too small, indivisible,
// mismatched).
struct DimensionError : Error {
    using Error::Error;
};

// The feasible region of an L1 program is provably empty.
struct InfeasibleError : Error {
    using Error::Error;
};

// An iterative routine hit its iteration cap before reaching tolerance.
struct ConvergenceError : Error {
    using Error::Error;
};

// Variance estimate beta_tk^2 + beta_tt*beta_kk was non-positive; the edge
// carries no usable statistic.
struct NonPositiveVarianceError : Error {
    using Error::Error;
};

// Scalar argument outside the mathematical domain (e.g. quantile p not in (0,1)).
struct DomainError : Error {
    using Error::Error;
};

// Malformed text input; message carries row/column location.
struct ParseError : Error {
    using Error::Error;
};

// Rows of a CSV file have differing field counts.
struct NonRectangularError : ParseError {
    using ParseError::ParseError;
};

// Bad or missing configuration (unknown key, unparsable value).
struct ConfigError : Error {
    using Error::Error;
};

// Cross-validation called with no candidate tuning values.
struct EmptyGridError : ConfigError {
    using ConfigError::ConfigError;
};

// Declared interface whose implementation is intentionally absent.
struct NotImplementedError : Error {
    using Error::Error;
};

// Filesystem failure while writing results.
struct IoError : Error {
    using Error::Error;
};

}  // namespace cggm
