#pragma once

#include <stdexcept>
#include <string>

namespace spectralab {

/// Malformed or out-of-range user input (files, options, curve data).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mathematically invalid request, e.g. the divisor of the zero function.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical solver failure; carries whatever diagnostics were available.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, int iterations, double residual)
      : std::runtime_error(what), iterations_(iterations), residual_(residual) {}

  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

}  // namespace spectralab
