#pragma once

#include <stdexcept>
#include <string>

namespace hscale {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid argument or configuration (bad parameter, malformed input).
struct InvalidArgument : Error {
    using Error::Error;
};

/// Numerical failure (overflow, eigensolver breakdown, singular step).
struct NumericError : Error {
    using Error::Error;
};

/// A non-finite quantity was encountered where a finite one is required.
struct InvalidElement : Error {
    using Error::Error;
};

}  // namespace hscale
