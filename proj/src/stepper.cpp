#include "plapmem/stepper.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace plapmem {

namespace {

void axpy(double a, const CoeffVec& x, CoeffVec& y) {
  for (size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

CoeffVec lin2(double a, const CoeffVec& x, double b, const CoeffVec& y) {
  CoeffVec z(x.size());
  for (size_t i = 0; i < z.size(); ++i) z[i] = a * x[i] + b * y[i];
  return z;
}

double norm2(const CoeffVec& v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

}  // namespace

void ProblemSpec::validate() const {
  if (!(p >= 2.0))
    throw UnsupportedExponent("ProblemSpec: requires p >= 2, got p=" + std::to_string(p));
  if (!std::isfinite(a) || !std::isfinite(b) || !(a < b))
    throw std::invalid_argument("ProblemSpec: invalid interval [" + std::to_string(a) +
                                ", " + std::to_string(b) + "]");
  if (!(T > 0.0) || !std::isfinite(T))
    throw std::invalid_argument("ProblemSpec: requires T > 0, got T=" + std::to_string(T));
  if (!u0 || !f || !kernel.g || !kernel.g_prime)
    throw std::invalid_argument("ProblemSpec: u0, f and kernel must all be set");
  if (std::abs(u0(a)) > 1e-8 || std::abs(u0(b)) > 1e-8)
    throw std::invalid_argument("ProblemSpec: u0 must vanish at the boundary, got u0(a)=" +
                                std::to_string(u0(a)) + " u0(b)=" + std::to_string(u0(b)));
  // spot-check finiteness of the data on a coarse grid
  for (int i = 0; i <= 4; ++i) {
    double x = a + (b - a) * (i + 0.5) / 5.0;
    if (!std::isfinite(u0(x)))
      throw NonFiniteInput("ProblemSpec: u0 non-finite at x=" + std::to_string(x));
    for (int j = 0; j <= 4; ++j) {
      double t = T * j / 4.0;
      if (!std::isfinite(f(x, t)))
        throw NonFiniteInput("ProblemSpec: f non-finite at (x,t)=(" + std::to_string(x) +
                             ", " + std::to_string(t) + ")");
    }
  }
}

void SolverOptions::validate() const {
  if (!(tol > 0.0)) throw ConfigError("solver.tol must be > 0");
  if (max_iter < 1) throw ConfigError("solver.max_iter must be >= 1");
  if (!(relaxation > 0.0) || relaxation > 1.0)
    throw ConfigError("solver.relaxation must be in (0, 1]");
  if (eps_reg < 0.0) throw ConfigError("solver.eps_reg must be >= 0");
}

double check_delta_admissible(const Kernel& kern, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw std::invalid_argument("check_delta_admissible: delta must be positive, got " +
                                std::to_string(delta));
  double coef = 0.5 + delta * kern.g0 / 8.0;
  if (!(coef > 0.0)) {
    double bound = kern.g0 < 0.0 ? -4.0 / kern.g0 : std::numeric_limits<double>::infinity();
    throw InadmissibleStep(
        "step size delta=" + std::to_string(delta) +
            " is inadmissible: 1/2 + delta*g(0)/8 = " + std::to_string(coef) +
            " <= 0 with g(0)=" + std::to_string(kern.g0) +
            "; requires delta < -4/g(0) = " + std::to_string(bound),
        coef, bound);
  }
  return coef;
}

namespace {

double init_coef(const ProblemSpec& prob, double delta) {
  prob.validate();
  return check_delta_admissible(prob.kernel, delta);
}

}  // namespace

Stepper::Stepper(ProblemSpec prob, FeSpace space, double delta)
    : prob_(std::move(prob)),
      space_(std::move(space)),
      delta_(delta),
      coef_(init_coef(prob_, delta_)),
      mu_((0.5 * prob_.kernel.g0 + 0.125 * delta_ * prob_.kernel.g_prime(0.0)) / coef_),
      M_(assemble_mass(space_)),
      chol_M_(M_),
      chol_coefM_(scaled_sum(coef_, M_, 0.0, M_)),
      u0h_(interpolate(prob_.u0, space_)) {
  int n_steps = std::max(1, static_cast<int>(std::lround(prob_.T / delta_)));
  prob_.kernel.check_finite_on(prob_.T, n_steps);
}

CoeffVec Stepper::load_node(int j) const {
  if (static_cast<int>(loads_node_.size()) <= j) {
    loads_node_.resize(j + 1);
    loads_node_set_.resize(j + 1, 0);
  }
  if (!loads_node_set_[j]) {
    loads_node_[j] = assemble_load(prob_.f, j * delta_, space_);
    loads_node_set_[j] = 1;
  }
  return loads_node_[j];
}

CoeffVec Stepper::load_mid(int k) const {
  if (static_cast<int>(loads_mid_.size()) <= k) {
    loads_mid_.resize(k + 1);
    loads_mid_set_.resize(k + 1, 0);
  }
  if (!loads_mid_set_[k]) {
    loads_mid_[k] = assemble_load(prob_.f, (k + 0.5) * delta_, space_);
    loads_mid_set_[k] = 1;
  }
  return loads_mid_[k];
}

CoeffVec Stepper::assemble_If(int k) const {
  QuadWeights w = quad_weights(k, delta_);
  CoeffVec acc(space_.n_dof(), 0.0);
  for (const QuadEntry& e : w.entries) {
    if (e.arg == 0.0) continue;
    axpy(e.weight * prob_.kernel.g(e.arg), load_node(e.node), acc);
  }
  axpy(0.25 * delta_ * prob_.kernel.g0, load_mid(k), acc);
  return acc;
}

CoeffVec Stepper::y_rhs_combo(const CoeffVec& u_next, const History& hist, int k) const {
  const Kernel& kern = prob_.kernel;
  double t_half = (k + 0.5) * delta_;
  CoeffVec combo(space_.n_dof(), 0.0);
  axpy(-0.5, hist.y(k), combo);
  QuadWeights w = quad_weights(k, delta_);
  for (const QuadEntry& e : w.entries) {
    if (e.node <= k) {
      // history part of -Q_g(Y) and of Q_{g'}(U)
      axpy(-e.weight * kern.g(e.arg), hist.y(e.node), combo);
      axpy(e.weight * kern.g_prime(e.arg), hist.u(e.node), combo);
    } else {
      // the Q_g term at node k+1 sits on the left-hand side (in coef_);
      // only the Q_{g'} part of the new iterate contributes here
      axpy(e.weight * kern.g_prime(e.arg), u_next, combo);
    }
  }
  axpy(0.5 * kern.g0, u_next, combo);
  axpy(0.5 * kern.g0, hist.u(k), combo);
  axpy(-kern.g(t_half), u0h_, combo);
  return combo;
}

CoeffVec Stepper::solve_y(const CoeffVec& u_next, const History& hist, int k) const {
  if (static_cast<int>(u_next.size()) != space_.n_dof())
    throw std::invalid_argument("solve_y: u_next size mismatch");
  if (k < 0 || k > hist.last_index())
    throw MissingHistory("solve_y: step " + std::to_string(k) + " needs history entries 0.." +
                         std::to_string(k) + ", stored " + std::to_string(hist.size()));
  CoeffVec rhs = M_.multiply(y_rhs_combo(u_next, hist, k));
  axpy(-1.0, assemble_If(k), rhs);
  return chol_coefM_.solve(rhs);
}

Stepper::Result Stepper::step(const History& hist, int k, const SolverOptions& opts) const {
  opts.validate();
  if (k != hist.last_index())
    throw std::invalid_argument("step: k=" + std::to_string(k) +
                                " must be the newest history entry (last=" +
                                std::to_string(hist.last_index()) + ")");
  const CoeffVec& uk = hist.u(k);
  const CoeffVec& yk = hist.y(k);
  const int n = space_.n_dof();
  const double p = prob_.p;
  CoeffVec Fmid = load_mid(k);

  // The y-equation is linear in the new iterate: Y(U) = y_base + mu * U.
  // Substituting it into the u-equation removes the lag between the two
  // unknowns, so the outer loop iterates on U alone.
  CoeffVec y_base = solve_y(CoeffVec(n, 0.0), hist, k);

  // coupled residual at iterate u with the eliminated y
  auto residual = [&](const CoeffVec& u, const CoeffVec& ubar) {
    CoeffVec combo(n);
    for (int i = 0; i < n; ++i)
      combo[i] = (u[i] - uk[i]) / delta_ - 0.5 * (y_base[i] + mu_ * u[i] + yk[i]);
    CoeffVec R = M_.multiply(combo);
    axpy(1.0, plap_residual(ubar, p, space_), R);
    axpy(-1.0, Fmid, R);
    return R;
  };

  StepDiagnostics diag;
  diag.delta_coefficient = coef_;
  CoeffVec u_m = uk;
  bool converged = false;
  for (int it = 1; it <= opts.max_iter; ++it) {
    CoeffVec ubar = lin2(0.5, u_m, 0.5, uk);
    CoeffVec u_new;
    if (opts.method == NonlinearMethod::picard) {
      BandedSpdMatrix K = frozen_stiffness(ubar, p, 0.0, space_);
      BandedSpdMatrix A = scaled_sum(1.0 / delta_ - 0.5 * mu_, M_, 0.5, K);
      CoeffVec b = M_.multiply(lin2(1.0 / delta_, uk, 0.5, lin2(1.0, y_base, 1.0, yk)));
      axpy(-0.5, K.multiply(uk), b);
      axpy(1.0, Fmid, b);
      u_new = BandedCholesky(A).solve(b);
      if (opts.relaxation < 1.0)
        u_new = lin2(opts.relaxation, u_new, 1.0 - opts.relaxation, u_m);
    } else {
      BandedSpdMatrix J = plap_jacobian(ubar, p, opts.eps_reg, space_);
      // d/dU N((U + U^k)/2) = J(ubar)/2
      BandedSpdMatrix A = scaled_sum(1.0 / delta_ - 0.5 * mu_, M_, 0.5, J);
      CoeffVec R = residual(u_m, ubar);
      for (double& v : R) v = -v;
      CoeffVec du = BandedCholesky(A).solve(R);
      u_new = u_m;
      axpy(opts.relaxation, du, u_new);
    }
    diag.iterations = it;
    diag.increment_norm = mass_norm(M_, lin2(1.0, u_new, -1.0, u_m));
    u_m = std::move(u_new);
    if (diag.increment_norm <= opts.tol) {
      converged = true;
      break;
    }
    // residual check catches the linear case (p = 2) in one pass
    CoeffVec R = residual(u_m, lin2(0.5, u_m, 0.5, uk));
    double dual = mass_norm(M_, chol_M_.solve(R));
    if (dual <= opts.tol) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw NonConvergence("step k=" + std::to_string(k) + ": nonlinear iteration failed after " +
                             std::to_string(opts.max_iter) + " iterations, last increment " +
                             std::to_string(diag.increment_norm),
                         diag.iterations, diag.increment_norm);

  // final y from the fresh linear solve
  CoeffVec y_new = solve_y(u_m, hist, k);
  CoeffVec r = M_.multiply(y_new);
  for (double& v : r) v *= coef_;
  CoeffVec rhs = M_.multiply(y_rhs_combo(u_m, hist, k));
  axpy(-1.0, assemble_If(k), rhs);
  axpy(-1.0, rhs, r);
  diag.y_residual = norm2(r);
  return {std::move(u_m), std::move(y_new), diag};
}

History run(const ProblemSpec& prob, const FeSpace& space, int n_steps,
            const SolverOptions& opts, std::vector<StepDiagnostics>* diags) {
  if (n_steps < 1)
    throw std::invalid_argument("run: requires n_steps >= 1, got " + std::to_string(n_steps));
  double delta = prob.T / n_steps;
  Stepper st(prob, space, delta);
  History hist = History::start(delta, st.u0h());
  for (int k = 0; k < n_steps; ++k) {
    Stepper::Result res = st.step(hist, k, opts);
    if (diags) diags->push_back(res.diag);
    hist.append(std::move(res.u), std::move(res.y));
  }
  return hist;
}

}  // namespace plapmem
