// Crank-Nicolson time stepping for the coupled (u, y) system
//   du/dt - div(|u'|^{p-2} u') = y + f,   y = -Q_g(y) + g(0) u - g(t) u0
//                                             + Q_{g'}(u) - I(f)
// discretized at the half steps t_{k+1/2}.  Each step solves the linear
// y-equation exactly as an affine function of the unknown U^{k+1} and runs a
// Picard (or damped Newton) iteration on the eliminated u-equation.
#pragma once

#include <functional>
#include <vector>

#include "plapmem/assembly.hpp"
#include "plapmem/memory_term.hpp"

namespace plapmem {

struct ProblemSpec {
  double p = 2.0;            // flux exponent, >= 2
  double a = 0.0, b = 1.0;   // spatial interval
  double T = 1.0;            // final time
  std::function<double(double)> u0;          // initial datum, u0(a) = u0(b) = 0
  std::function<double(double, double)> f;   // forcing f(x, t)
  Kernel kernel;

  void validate() const;
};

enum class NonlinearMethod { picard, newton };

struct SolverOptions {
  NonlinearMethod method = NonlinearMethod::picard;
  double tol = 1e-10;        // mass-norm increment / residual tolerance
  int max_iter = 100;
  double relaxation = 1.0;   // in (0,1]; under-relaxation / Newton damping
  double eps_reg = 1e-12;    // Jacobian regularization (Newton only)

  void validate() const;
};

struct StepDiagnostics {
  int iterations = 0;
  double increment_norm = 0.0;
  double y_residual = 0.0;        // 2-norm residual of the linear y-solve
  double delta_coefficient = 0.0; // 1/2 + delta*g(0)/8
};

// Returns the y-equation diagonal coefficient 1/2 + delta*g(0)/8; throws
// InadmissibleStep when it is not positive (possible only for g(0) < 0,
// where the admissible range is delta < -4/g(0)).
double check_delta_admissible(const Kernel& kern, double delta);

class Stepper {
 public:
  // Validates the problem, checks admissibility, assembles and factorizes
  // the mass matrix; delta = T/N is fixed for the whole run.
  Stepper(ProblemSpec prob, FeSpace space, double delta);

  // Solves the linear y-equation at step k for a given iterate U^{k+1}:
  //   (1/2 + delta*g(0)/8) M Y^{k+1} =
  //     -M [ Y^k/2 + history part of Q_g(Y) ]
  //     + M [ g(0) (U^{k+1}+U^k)/2 - g(t_{k+1/2}) u0_h + Q_{g'}(U) ] - I(f).
  // Affine in u_next; with g == 0 it degenerates to Y^{k+1} = -Y^k.
  CoeffVec solve_y(const CoeffVec& u_next, const History& hist, int k) const;

  struct Result {
    CoeffVec u, y;
    StepDiagnostics diag;
  };
  // Advances one step from history entry k (which must be the newest).
  Result step(const History& hist, int k, const SolverOptions& opts) const;

  double delta() const { return delta_; }
  double delta_coefficient() const { return coef_; }
  const BandedSpdMatrix& mass() const { return M_; }
  const FeSpace& space() const { return space_; }
  const CoeffVec& u0h() const { return u0h_; }
  double mass_norm_of(const CoeffVec& v) const { return mass_norm(M_, v); }

 private:
  CoeffVec load_node(int j) const;  // F(t_j), cached
  CoeffVec load_mid(int k) const;   // F(t_{k+1/2}), cached
  CoeffVec assemble_If(int k) const;
  // coefficient-space rhs of the y-equation before the mass pairing
  CoeffVec y_rhs_combo(const CoeffVec& u_next, const History& hist, int k) const;

  ProblemSpec prob_;
  FeSpace space_;
  double delta_;
  double coef_;  // 1/2 + delta*g(0)/8
  double mu_;    // dY/dU = (g(0)/2 + delta*g'(0)/8) / coef
  BandedSpdMatrix M_;
  BandedCholesky chol_M_, chol_coefM_;
  CoeffVec u0h_;
  mutable std::vector<CoeffVec> loads_node_, loads_mid_;
  mutable std::vector<char> loads_node_set_, loads_mid_set_;
};

// Runs N steps of size T/N and returns the full trajectory.  Per-step
// diagnostics are appended to *diags when given.
History run(const ProblemSpec& prob, const FeSpace& space, int n_steps,
            const SolverOptions& opts,
            std::vector<StepDiagnostics>* diags = nullptr);

}  // namespace plapmem
