#pragma once

#include <stdexcept>
#include <string>

namespace mcd {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A matrix required to be positive definite is singular or indefinite.
struct DegenerateMatrix : Error {
    using Error::Error;
};

/// Dimension mismatch between operands.
struct ShapeError : Error {
    using Error::Error;
};

/// A subset whose trimmed covariance is rank deficient.
struct DegenerateSubset : Error {
    using Error::Error;
};

/// Every admissible subset of the sample is degenerate.
struct DegenerateSample : Error {
    using Error::Error;
};

/// Exact enumeration would exceed the feasibility guard.
struct TooLarge : Error {
    using Error::Error;
};

/// Quadrature failed to reach the requested tolerance.
struct QuadratureError : Error {
    using Error::Error;
};

/// The derivative map is numerically singular; carries the condition estimate.
struct SingularDerivative : Error {
    explicit SingularDerivative(const std::string& what, double condition_estimate)
        : Error(what), condition(condition_estimate) {}
    double condition;
};

struct BadBandwidth : Error {
    using Error::Error;
};

/// Trimming fraction outside (0, 1).
struct BadFraction : Error {
    using Error::Error;
};

/// Root bracketing for r(gamma) failed.
struct BracketError : Error {
    using Error::Error;
};

/// Influence function requested on the discontinuity shell ||x|| = r.
struct BoundaryUndefined : Error {
    using Error::Error;
};

struct UnknownModel : Error {
    using Error::Error;
};

/// File could not be opened or written.
struct IoError : Error {
    using Error::Error;
};

/// Malformed input file; carries the 1-based line number.
struct ParseError : Error {
    explicit ParseError(const std::string& what, long line_number)
        : Error(what), line(line_number) {}
    long line;
};

}  // namespace mcd
