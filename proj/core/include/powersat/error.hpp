#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace powersat {

/// Base class for every error the library reports to callers.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed DSL text. Carries a 1-based source position.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Operand widths that violate the width discipline of an operator.
class WidthError : public Error {
 public:
  using Error::Error;
};

/// Stimulus configuration problems (missing ports, bad vectors, bad JSON).
class StimulusError : public Error {
 public:
  using Error::Error;
};

/// A broken internal invariant, e.g. an unsound merge. Never expected in
/// normal operation.
class InternalError : public Error {
 public:
  using Error::Error;
};

}  // namespace powersat
