#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace riskmine {

// Root of every error the library throws. The CLI maps the subclasses onto
// exit codes (usage = 1, data = 2, training = 3).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --- data errors -----------------------------------------------------------

class DataError : public Error {
 public:
  using Error::Error;
};

class FormatError : public DataError {
 public:
  using DataError::DataError;
};

class InsufficientDataError : public DataError {
 public:
  using DataError::DataError;
};

class DomainError : public DataError {
 public:
  using DataError::DataError;
};

class DegenerateCorrelationError : public DataError {
 public:
  using DataError::DataError;
};

class BacktestError : public DataError {
 public:
  using DataError::DataError;
};

enum class ParseErrorKind {
  kUnknownFeature,
  kUnbalancedParentheses,
  kWeightNotInCatalog,
  kArityViolation,
  kAmbiguousOption,
  kUnexpectedCharacter,
  kUnexpectedEnd,
  kOperatorDisabled,
};

const char* to_string(ParseErrorKind kind);

class ParseError : public DataError {
 public:
  ParseError(ParseErrorKind kind, std::size_t position, const std::string& detail)
      : DataError("parse error (" + std::string(to_string(kind)) + ") at position " +
                  std::to_string(position) + ": " + detail),
        kind_(kind),
        position_(position) {}

  ParseErrorKind kind() const noexcept { return kind_; }
  std::size_t position() const noexcept { return position_; }

 private:
  ParseErrorKind kind_;
  std::size_t position_;
};

// --- usage / configuration errors -------------------------------------------

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

// Misuse of an API object, e.g. running backward twice on one graph.
class UsageError : public Error {
 public:
  using Error::Error;
};

// --- training errors ---------------------------------------------------------

class TrainingError : public Error {
 public:
  using Error::Error;
};

// A documented precondition was violated by the caller.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace riskmine
