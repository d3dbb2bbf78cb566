// The Volterra memory machinery: kernel bundles (g, g', g(0)), the stored
// discrete trajectory, and the composite trapezoid-plus-half-step quadrature
// used for the history sums at t_{k+1/2}.
//
// The rule integrates \int_0^{t_{k+1/2}} g(t_{k+1/2} - s) v(s) ds with the
// trapezoid rule on the k whole steps and on the trailing half step, where
// v(t_{k+1/2}) is replaced by the average (v_k + v_{k+1})/2.  Collecting
// weights per stored node gives, for k >= 1,
//   (j=0,   arg t_{k+1/2},       delta/2)
//   (j,     arg t_{k+1/2}-t_j,   delta)      for j = 1..k-1
//   (j=k,   arg delta/2,         3*delta/4)
//   (j=k,   arg 0,               delta/8)
//   (j=k+1, arg 0,               delta/8)
// and for k = 0 the first interval is itself the half step:
//   (0, delta/2, delta/4), (0, 0, delta/8), (1, 0, delta/8).
// Weights always sum to t_{k+1/2}.
#pragma once

#include <functional>
#include <vector>

#include "plapmem/mesh.hpp"

namespace plapmem {

struct Kernel {
  std::function<double(double)> g;
  std::function<double(double)> g_prime;
  double g0 = 0.0;  // g(0), cached because it decides step admissibility

  static Kernel exponential(double rate, double scale = 1.0);  // scale*exp(-rate*t)
  static Kernel constant(double value);
  static Kernel polynomial(std::vector<double> coeffs);  // sum c_i t^i
  static Kernel zero();

  // Samples g and g' at 0, t_end and all step midpoints; throws
  // NonFiniteInput on NaN/Inf.  Run once per configuration.
  void check_finite_on(double t_end, int n_steps) const;
};

struct QuadEntry {
  int node;       // trajectory index j the weight applies to (0..k+1)
  double arg;     // kernel argument t_{k+1/2} - t_j (0 for the tail pair)
  double weight;  // quadrature weight
};

struct QuadWeights {
  int k = 0;
  double delta = 0.0;
  std::vector<QuadEntry> entries;
  double weight_sum() const;  // == (k + 1/2) * delta
};

QuadWeights quad_weights(int k, double delta);

// The discrete trajectory (U^j, Y^j), j = 0..size-1, appended as the solver
// marches.  Entry 0 is (interpolated initial datum, 0).
class History {
 public:
  static History start(double delta, CoeffVec u0);
  void append(CoeffVec u, CoeffVec y);

  double delta() const { return delta_; }
  double time(int j) const { return delta_ * j; }
  int size() const { return static_cast<int>(u_.size()); }
  int last_index() const { return size() - 1; }
  const CoeffVec& u(int j) const;
  const CoeffVec& y(int j) const;

 private:
  explicit History(double delta) : delta_(delta) {}
  double delta_;
  std::vector<CoeffVec> u_, y_;
};

// Q_g(Y)(t_{k+1/2}) = sum_j c_j g(arg_j) Y^{node_j}, coefficient-space (the
// caller applies the mass pairing).  The j = k+1 term reads *y_next when
// given, otherwise history entry k+1 (MissingHistory if absent).
CoeffVec eval_Qg(const History& hist, const Kernel& kern, int k,
                 const CoeffVec* y_next = nullptr);

// Same rule with g' applied to the U trajectory.
CoeffVec eval_Qgprime(const History& hist, const Kernel& kern, int k,
                      const CoeffVec* u_next = nullptr);

// Quadrature of \int_0^{t_{k+1/2}} g(t_{k+1/2}-s) F(s) ds on load vectors.
// Since f is known in closed form, the tail samples F(t_{k+1/2}) directly
// with weight delta/4 * g(0) instead of averaging endpoint loads.
CoeffVec eval_If(const std::function<double(double, double)>& f, const Kernel& kern,
                 int k, double delta, const FeSpace& s);

}  // namespace plapmem
