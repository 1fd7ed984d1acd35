#pragma once

#include <stdexcept>
#include <string>

namespace ebcred {

/// Invalid configuration value (bad n, gamma outside (0,1), unknown mode, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of a function (e.g. index 0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The requested operation is not defined for this model.
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Non-finite result or a root/quantile search that failed to converge.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// File-system failure; the message names the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ebcred
