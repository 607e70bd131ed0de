#ifndef FRACSHE_ERROR_HPP_
#define FRACSHE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace fracshe {

/// Base of every error raised by the library. The CLI maps the derived
/// categories to exit codes: configuration and parameter errors exit 2,
/// numeric failures exit 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char *category() const noexcept { return "error"; }
};

/// A model parameter lies outside its admissible domain.
class ParameterDomainError : public Error {
 public:
  using Error::Error;
  const char *category() const noexcept override { return "parameter_domain"; }
};

/// Invalid grid, solver, estimator or harness configuration.
class ConfigurationError : public Error {
 public:
  using Error::Error;
  const char *category() const noexcept override { return "configuration"; }
};

/// The requested evaluation is not resolved by the grid.
class ResolutionError : public ConfigurationError {
 public:
  using ConfigurationError::ConfigurationError;
  const char *category() const noexcept override { return "resolution"; }
};

/// Quadrature, factorization or embedding failure.
class NumericError : public Error {
 public:
  using Error::Error;
  const char *category() const noexcept override { return "numeric"; }
};

/// Solution left the finite range during time stepping.
class BlowUpError : public NumericError {
 public:
  BlowUpError(const std::string &what, long step)
      : NumericError(what), step_(step) {}
  long step() const noexcept { return step_; }
  const char *category() const noexcept override { return "blow_up"; }

 private:
  long step_;
};

/// Statistical test cannot be formed (e.g. σ vanishes on the ensemble).
class DegenerateTestError : public Error {
 public:
  using Error::Error;
  const char *category() const noexcept override { return "degenerate_test"; }
};

}  // namespace fracshe

#endif  // FRACSHE_ERROR_HPP_
