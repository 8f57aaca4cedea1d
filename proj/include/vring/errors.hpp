#pragma once

#include <stdexcept>
#include <string>

namespace vring {

// Invalid user-facing configuration (bad bounds, out-of-range parameters).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Argument outside the domain of a mathematical function (r <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Evaluation requested at a singular point of a kernel.
class SingularError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Iterative or adaptive numerics failed to reach the requested accuracy.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ToleranceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// A search interval failed to bracket the quantity sought.
class RangeError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Inputs that are individually valid but inconsistent with each other.
class ConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace vring
