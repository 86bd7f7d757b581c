#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wigner {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid configuration (matrix dimension, experiment config, flags).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A documented precondition of a numerical routine does not hold.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Truncation level leaves no mass (sigma^2 <= 0).
class DegenerateTruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Eigensolver failed to converge; carries the index of the stuck eigenvalue.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::size_t index)
      : std::runtime_error(what + " (index " + std::to_string(index) + ")"), index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// File-system failure; the message always names the path.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wigner
