#pragma once

#include <stdexcept>
#include <string>

namespace tsl {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid domain inputs (bad spectra, dimension mismatches, range violations).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed or incomplete experiment configuration. CLI exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure during a computation (singular covariance, undefined
/// bound, stability-guard violation). CLI exit code 3.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Filesystem / serialization failure. CLI exit code 4.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace tsl
