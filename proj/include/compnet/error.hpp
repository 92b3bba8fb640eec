#ifndef COMPNET_ERROR_HPP
#define COMPNET_ERROR_HPP

#include <stdexcept>
#include <string>

namespace compnet {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Two operands disagree on the width of a shared boundary.
struct WidthMismatch : Error {
    using Error::Error;
};

/// A component boundary exceeded the configured width guard.
struct WidthGuardError : Error {
    using Error::Error;
};

struct ValidationError : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

/// Explicit-state exploration refused because the state space is too large.
struct CapacityError : Error {
    using Error::Error;
};

} // namespace compnet

#endif
