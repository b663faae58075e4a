#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lyaptrade {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mismatched dimensions, unknown ids, inputs outside an admissible band.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. `row()` is 1-based over data rows, 0 for the header.
class ParseError : public Error {
 public:
  ParseError(std::size_t row, const std::string& what)
      : Error("row " + std::to_string(row) + ": " + what), row_(row) {}
  std::size_t row() const { return row_; }

 private:
  std::size_t row_;
};

/// A table, enumeration or search would exceed its configured cell cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"),
        residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

/// Too few replications to support a 3-sigma statistical verdict.
class StatisticalPowerError : public Error {
 public:
  using Error::Error;
};

/// Configuration problem located by a JSON pointer.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& pointer, const std::string& what)
      : Error(pointer + ": " + what), pointer_(pointer) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

}  // namespace lyaptrade
