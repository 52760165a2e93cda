#pragma once

#include <stdexcept>
#include <string>

namespace bscp {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unreadable image, empty foreground, degenerate or too-thin shape.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Malformed configuration text or out-of-range parameter.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Model, descriptor dump or report that cannot be parsed.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Numerical failure (singular system, non-finite values, bad dimensions).
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace bscp
