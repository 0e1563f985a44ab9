#pragma once

#include <stdexcept>
#include <string>

namespace manylaser {

// Base for every failure raised by the library. The CLI maps the concrete
// type onto a process exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument: site out of range, mismatched dimensions, bad params.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A construction or solve would exceed the configured memory budget.
class BudgetError : public Error {
 public:
  using Error::Error;
};

// The bordered steady-state system is singular (steady state not unique).
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

// A solve finished but missed its residual target.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double achieved)
      : Error(what), achieved_residual_(achieved) {}
  double achieved_residual() const noexcept { return achieved_residual_; }

 private:
  double achieved_residual_;
};

// Trajectory integration lost too much norm inside a single step.
class StepSizeError : public Error {
 public:
  using Error::Error;
};

// Internal bookkeeping broke (e.g. amplitude leaked out of the Fock window).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

// Statistic with a vanishing denominator (g2 at zero photons, 0/0 ratios).
class UndefinedStatistic : public Error {
 public:
  using Error::Error;
};

// Malformed run configuration; `field` names the offending key.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : Error(field + ": " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace manylaser
