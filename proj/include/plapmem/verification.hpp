// Manufactured solutions with closed-form (u, y, f), a brute-force
// convolution oracle for y, and mesh/step refinement studies producing
// empirical convergence orders.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "plapmem/stepper.hpp"

namespace plapmem {

// A problem whose exact solution is known.  All closed forms are functions
// of (x, t); f is chosen so that u_t - div(|u'|^{p-2}u') = y + f holds with
// y(x,t) = \int_0^t g(t-s) div(|u'|^{p-2}u')(x,s) ds.
struct ManufacturedCase {
  std::string name;
  double p = 2.0;
  double a = 0.0, b = 1.0, T = 1.0;
  Kernel kernel;
  std::function<double(double, double)> u, u_t, delta_p_u, y, f;

  ProblemSpec problem() const;
};

// u = e^{-t} x(1-x) on (0,1): the p-flux is elementwise polynomial, so for
// r = 2 the spatial discretization is exact.  Defined for p > 2 only (the
// closed form for y divides by p - 2).
ManufacturedCase case_MS1(double p);

// u = e^{-t} sin(pi x) on (0,1), kernel g = e^{-t}; valid for all p >= 2
// (the time factor of y degenerates to t e^{-t} at p = 2).
ManufacturedCase case_MS2(double p);

// Composite-trapezoid evaluation of \int_0^t g(t-s) delta_p_u(x,s) ds with
// `resolution` panels; the independent oracle for the closed-form y.
double brute_force_y(const ManufacturedCase& c, double x, double t, int resolution);

struct CaseCheck {
  double max_pde_residual = 0.0;  // |u_t - delta_p_u - y - f| on a grid
  double max_y0 = 0.0;            // |y(x, 0)|
  double max_oracle_gap = 0.0;    // |y - brute_force_y|
  bool pass(double tol = 1e-8) const;
};
// 20x20 interior grid for the PDE identity, 5x5 for the oracle.
CaseCheck validate_case(const ManufacturedCase& c, int oracle_resolution = 100000);

struct StudyLevel {
  int m = 0;                      // elements
  int n_steps = 0;
  double param = 0.0;             // h (spatial axis) or delta (temporal axis)
  double err_u = 0.0, err_y = 0.0;  // L2 errors at t = T
  double max_u_norm = 0.0, max_y_norm = 0.0;  // max over steps of ||.||_M
  int total_iterations = 0;
  double delta_coefficient = 0.0;
};

struct ConvergenceTable {
  enum class Axis { space, time };
  Axis axis = Axis::space;
  std::vector<StudyLevel> levels;
  std::vector<double> eoc_u, eoc_y;  // adjacent-pair orders, size-1 entries

  // Least-squares slope of log err vs log param over the whole ladder; the
  // single number quoted as "the" empirical order.
  double fitted_order_u() const;
  double fitted_order_y() const;
  void write_csv(std::ostream& os) const;  // param,err_u,err_y,eoc_u,eoc_y
};

struct StudyOptions {
  SolverOptions solver;
  int n_fixed = 0;   // spatial study: fixed step count; 0 = use n_per_m
  int n_per_m = 4;   // spatial study: N = n_per_m * m
  int quad_points = 0;
  int threads = 1;   // levels run in parallel, results kept in ladder order
};

// Refines the mesh m in m_list at temporally-resolved step counts.
ConvergenceTable spatial_study(const ManufacturedCase& c, int r,
                               const std::vector<int>& m_list,
                               const StudyOptions& opts = {});
// Refines the step count on a fixed fine mesh.
ConvergenceTable temporal_study(const ManufacturedCase& c, int r, int m_fine,
                                const std::vector<int>& n_list,
                                const StudyOptions& opts = {});

}  // namespace plapmem
