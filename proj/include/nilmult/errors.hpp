#pragma once

#include <stdexcept>
#include <string>

namespace nilmult {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: bad word syntax, invalid factor orders, mismatched bases.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// A configured resource cap (basis size, exponent bits) was exceeded.
class ResourceLimitExceeded : public Error {
public:
    using Error::Error;
};

/// An operation's documented precondition does not hold for its arguments.
class PreconditionViolation : public Error {
public:
    using Error::Error;
};

/// A mathematical invariant that must hold failed at runtime. Indicates a bug.
class InternalError : public Error {
public:
    using Error::Error;
};

} // namespace nilmult
