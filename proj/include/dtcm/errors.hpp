#pragma once

#include <stdexcept>
#include <string>

namespace dtcm {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Ill-formed inputs: alphabet mismatches, bad JSON, malformed flags.
struct StructuralError : Error {
    using Error::Error;
};

// Mathematically out-of-domain inputs: t <= t', ellipticity failure, ...
struct DomainError : Error {
    using Error::Error;
};

// Requested expansion order above the configured cap, or ell > n.
struct OrderError : Error {
    using Error::Error;
};

// Symbolic object exceeded the configured term budget.
struct ResourceError : Error {
    using Error::Error;
};

// exp_ad did not terminate: the ad-series is not nilpotent on this input.
struct NilpotencyError : Error {
    using Error::Error;
};

// Numerical breakdown in a solver (e.g. tridiagonal pivot ~ 0, NaN detected).
struct NumericError : Error {
    using Error::Error;
};

}  // namespace dtcm
