#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace crnerg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed network text. Line and column are 1-based.
class ParseError : public Error {
public:
    ParseError(const std::string& msg, std::size_t line, std::size_t column)
        : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

class UnsupportedOrder : public Error { using Error::Error; };
class ClassificationError : public Error { using Error::Error; };
class UnboundedParameter : public Error { using Error::Error; };
class MissingParameter : public Error { using Error::Error; };
class WrongMode : public Error { using Error::Error; };
class VertexLimitExceeded : public Error { using Error::Error; };
class PrerequisiteFailed : public Error { using Error::Error; };
class NumericalInconsistency : public Error { using Error::Error; };
class ContractViolation : public Error { using Error::Error; };
class SimulationOverflow : public Error { using Error::Error; };

}  // namespace crnerg
