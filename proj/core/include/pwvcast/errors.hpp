#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pwvcast {

// Root of every error the library throws. The CLI maps all of these to exit 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A value outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Inconsistent or missing configuration (bad delta, empty architecture, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

// Non-finite value produced during a forward pass or training.
class NumericError : public Error {
 public:
  using Error::Error;
};

// A cache or state object used with a model it was not produced for.
class ContractError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// Malformed model file.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Malformed CSV row; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Timestamp that does not fall on the cadence grid.
class AlignmentError : public ParseError {
 public:
  using ParseError::ParseError;
};

}  // namespace pwvcast
