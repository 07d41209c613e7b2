#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mpers {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what, std::size_t line = 0)
        : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// An operation was called outside its domain.
class PreconditionError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class ContainmentViolation : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

/// Exhaustive support enumeration was requested for more than two parameters.
class UnsupportedDimension : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class DivisionByZero : public Error {
public:
    DivisionByZero() : Error("division by zero") {}
};

} // namespace mpers
