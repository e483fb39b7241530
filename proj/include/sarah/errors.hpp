#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sarah {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

// Raised when an update produces NaN or Inf (typically a divergent step size).
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& detail, const std::string& source = "")
      : DataError((source.empty() ? "line " : source + ":") + std::to_string(line) + ": " +
                  detail),
        line_(line),
        detail_(detail) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class InapplicableError : public Error {
 public:
  using Error::Error;
};

}  // namespace sarah
