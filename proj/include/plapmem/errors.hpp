// Exception types shared across the solver library.  The CLI maps these to
// process exit codes; everything else lets them propagate.
#pragma once

#include <stdexcept>
#include <string>

namespace plapmem {

// An input sample (initial datum, kernel value, load, ...) was NaN or Inf.
struct NonFiniteInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// p < 2 is outside the regime the scheme supports.
struct UnsupportedExponent : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Cholesky hit a non-positive pivot; the matrix is not SPD.
struct NotPositiveDefinite : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A history index outside the stored trajectory was requested.
struct MissingHistory : std::out_of_range {
  using std::out_of_range::out_of_range;
};

// The step size makes the y-equation coefficient 1/2 + delta*g(0)/8
// non-positive; for g(0) < 0 the admissible range is delta < -4/g(0).
struct InadmissibleStep : std::runtime_error {
  double coefficient;
  double bound;  // largest admissible delta, +inf when unconstrained
  InadmissibleStep(const std::string& msg, double coefficient_, double bound_)
      : std::runtime_error(msg), coefficient(coefficient_), bound(bound_) {}
};

// The nonlinear iteration exhausted max_iter without meeting tol.
struct NonConvergence : std::runtime_error {
  int iterations;
  double last_increment;
  NonConvergence(const std::string& msg, int iterations_, double last_increment_)
      : std::runtime_error(msg), iterations(iterations_), last_increment(last_increment_) {}
};

// Bad run configuration (unknown key, missing field, out-of-range value).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace plapmem
