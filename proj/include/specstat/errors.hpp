#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace specstat {

/// Base class of all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameter combinations and misuse of the API (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Problems with input data: files, samples, sector choices (CLI exit code 3).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Numerical failures: solver breakdowns, tolerance violations (CLI exit code 4).
class NumericalError : public Error {
 public:
  using Error::Error;
};

// --- data errors ---

class ParseError : public DataError {
 public:
  ParseError(std::size_t line, const std::string& what)
      : DataError("parse error at line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class DuplicateLevelError : public DataError {
 public:
  explicit DuplicateLevelError(double value)
      : DataError("duplicate level " + std::to_string(value)), value_(value) {}
  double value() const { return value_; }

 private:
  double value_;
};

class TooFewLevelsError : public DataError {
 public:
  using DataError::DataError;
};

class EmptySampleError : public DataError {
 public:
  using DataError::DataError;
};

class SectorEmptyError : public DataError {
 public:
  using DataError::DataError;
};

class DimensionOverflowError : public DataError {
 public:
  using DataError::DataError;
};

class IoError : public DataError {
 public:
  using DataError::DataError;
};

// --- numerical errors ---

class NonFiniteError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NotHermitianError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NotUnitaryError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoConvergenceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class EigenSolverError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateSpacingError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateGammaError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class KramersPairingError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NotBlockCommutingError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace specstat
