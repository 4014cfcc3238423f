#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace seafarer {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file or document. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line = 0)
      : Error(line ? what + " (line " + std::to_string(line) + ")" : what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Input that parses but violates a documented invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Training diverged or could not resolve its inputs.
class TrainingError : public Error {
 public:
  using Error::Error;
};

/// A selection strategy could not produce an item.
class SelectionError : public Error {
 public:
  using Error::Error;
};

/// The labeling oracle could not deliver a label (e.g. human session closed).
class OracleError : public Error {
 public:
  using Error::Error;
};

}  // namespace seafarer
