#pragma once

#include <stdexcept>
#include <string>

namespace simbound {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string &what) : std::runtime_error(what) {}
};

/// Layer shapes do not chain, or an argument has the wrong dimension.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A value does not fit the configured fixed-point integer range.
class SaturationError : public Error {
public:
    using Error::Error;
};

/// Malformed model, config or certificate file.
class FormatError : public Error {
public:
    using Error::Error;
};

/// The conic backend failed, is missing, or returned something unusable.
class SolverError : public Error {
public:
    using Error::Error;
};

} // namespace simbound
