#pragma once

#include <stdexcept>
#include <string>

namespace wxverif {

/// Base for every error raised by the library. Carries a stable category
/// name so the CLI can map it to an exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* category() const noexcept { return "error"; }
};

/// Precondition of an operation was not met by the caller.
class ContractViolation : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "contract_violation"; }
};

/// E_F[w(X)] is at or below the numerical floor, so F_w does not exist.
class WeightedMassZero : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "weighted_mass_zero"; }
};

/// Conditional PIT requested where F(t) is numerically one.
class DegenerateConditional : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "degenerate_conditional"; }
};

class InsufficientData : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "insufficient_data"; }
};

/// The operation refuses this kind of input (e.g. owCRPS on a raw ensemble).
class Unsupported : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "unsupported"; }
};

/// Quadrature or optimisation failed to reach its accuracy target.
class NumericalError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "numerical"; }
};

/// Malformed input files, schemas or configuration.
class DataError : public Error {
 public:
  using Error::Error;
  const char* category() const noexcept override { return "data"; }
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ContractViolation(message);
}

}  // namespace wxverif
