#pragma once

#include <stdexcept>
#include <string>

namespace dulac {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Operands built in different scalar modes (exact vs floating).
struct ModeMismatch : Error {
    using Error::Error;
};

/// A value left the exact closure (rationals, fractional prime powers,
/// log-of-prime symbols); the computation must be re-run in float mode.
struct NeedsFloatMode : Error {
    using Error::Error;
};

/// Leading-term query or factorization on the zero series.
struct ZeroLeadingTerm : Error {
    using Error::Error;
};

/// An operation would create depth-3 iterated logarithms.
struct DepthExceeded : Error {
    using Error::Error;
};

/// Composition argument is not infinitesimal (leading x-exponent <= 0).
struct NotInfinitesimal : Error {
    using Error::Error;
};

/// Series expected to be tangent to the identity is not.
struct NotParabolic : Error {
    using Error::Error;
};

struct NotSupported : Error {
    using Error::Error;
};

struct DomainError : Error {
    using Error::Error;
};

struct NonMonotoneOrbit : Error {
    using Error::Error;
};

struct NoConvergence : Error {
    using Error::Error;
};

/// Truncation certificate does not cover the coefficients being read.
struct InsufficientOrder : Error {
    using Error::Error;
};

struct MissingLevelData : Error {
    using Error::Error;
};

struct MalformedLeadingTerm : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

struct UnsupportedExponent : Error {
    using Error::Error;
};

}  // namespace dulac
