#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace voltcheb {

/// Base of every error raised by the library. The category selects the CLI exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad argument to a numerical primitive (degree cap, point outside [0,1], bad order).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Expression or problem-file syntax error. `offset` is a byte offset into the source.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t offset)
        : Error(message + " (at byte " + std::to_string(offset) + ")"), detail_(message), offset_(offset) {}

    [[nodiscard]] std::size_t offset() const noexcept { return offset_; }
    /// The message without the offset suffix.
    [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

private:
    std::string detail_;
    std::size_t offset_;
};

/// Expression evaluation failure: unbound variable, ln of non-positive, division by zero, ...
class EvalError : public Error {
public:
    using Error::Error;
};

/// Problem definition is structurally invalid (missing key, variable misuse, bad domain).
class ProblemError : public Error {
public:
    using Error::Error;
};

/// Quadrature produced a non-finite sample or was given a bad box.
class QuadratureError : public Error {
public:
    using Error::Error;
};

/// Failure while building the collocation system.
class AssemblyError : public Error {
public:
    using Error::Error;
};

/// Pivot below the relative singularity threshold.
class SingularMatrixError : public Error {
public:
    SingularMatrixError(const std::string& message, std::size_t column)
        : Error(message), column_(column) {}

    [[nodiscard]] std::size_t column() const noexcept { return column_; }

private:
    std::size_t column_;
};

/// Newton iteration failed to reach the requested tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace voltcheb
