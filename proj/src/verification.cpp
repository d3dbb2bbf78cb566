#include "plapmem/verification.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <thread>
#include <utility>

namespace plapmem {

namespace {

// time factor of y for kernel e^{-t}: \int_0^t e^{-(t-s)} e^{-(p-1)s} ds,
// written with expm1 so p -> 2 degenerates smoothly to t e^{-t}
double time_factor(double p, double t) {
  if (std::abs(p - 2.0) < 1e-12) return t * std::exp(-t);
  return std::exp(-t) * (-std::expm1(-(p - 2.0) * t)) / (p - 2.0);
}

}  // namespace

ProblemSpec ManufacturedCase::problem() const {
  ProblemSpec prob;
  prob.p = p;
  prob.a = a;
  prob.b = b;
  prob.T = T;
  auto u_fn = u;
  prob.u0 = [u_fn](double x) { return u_fn(x, 0.0); };
  prob.f = f;
  prob.kernel = kernel;
  return prob;
}

ManufacturedCase case_MS1(double p) {
  if (!(p > 2.0))
    throw UnsupportedExponent("case_MS1: defined for p > 2 only, got p=" + std::to_string(p));
  ManufacturedCase c;
  c.name = "MS1";
  c.p = p;
  c.kernel = Kernel::exponential(1.0);
  c.u = [](double x, double t) { return std::exp(-t) * x * (1.0 - x); };
  c.u_t = [](double x, double t) { return -std::exp(-t) * x * (1.0 - x); };
  // u' = e^{-t}(1-2x); (|u'|^{p-2}u')' = -2(p-1) e^{-(p-1)t} |1-2x|^{p-2}
  c.delta_p_u = [p](double x, double t) {
    return -2.0 * (p - 1.0) * std::exp(-(p - 1.0) * t) *
           std::pow(std::abs(1.0 - 2.0 * x), p - 2.0);
  };
  c.y = [p](double x, double t) {
    return -2.0 * (p - 1.0) * std::pow(std::abs(1.0 - 2.0 * x), p - 2.0) * time_factor(p, t);
  };
  auto ut = c.u_t, dpu = c.delta_p_u, yy = c.y;
  c.f = [ut, dpu, yy](double x, double t) { return ut(x, t) - dpu(x, t) - yy(x, t); };
  return c;
}

ManufacturedCase case_MS2(double p) {
  if (!(p >= 2.0))
    throw UnsupportedExponent("case_MS2: requires p >= 2, got p=" + std::to_string(p));
  ManufacturedCase c;
  c.name = "MS2";
  c.p = p;
  c.kernel = Kernel::exponential(1.0);
  c.u = [](double x, double t) { return std::exp(-t) * std::sin(M_PI * x); };
  c.u_t = [](double x, double t) { return -std::exp(-t) * std::sin(M_PI * x); };
  // u' = pi e^{-t} cos(pi x);
  // (|u'|^{p-2}u')' = -(p-1) pi^p e^{-(p-1)t} |cos(pi x)|^{p-2} sin(pi x)
  double amp = (p - 1.0) * std::pow(M_PI, p);
  c.delta_p_u = [p, amp](double x, double t) {
    return -amp * std::exp(-(p - 1.0) * t) *
           std::pow(std::abs(std::cos(M_PI * x)), p - 2.0) * std::sin(M_PI * x);
  };
  c.y = [p, amp](double x, double t) {
    return -amp * std::pow(std::abs(std::cos(M_PI * x)), p - 2.0) * std::sin(M_PI * x) *
           time_factor(p, t);
  };
  auto ut = c.u_t, dpu = c.delta_p_u, yy = c.y;
  c.f = [ut, dpu, yy](double x, double t) { return ut(x, t) - dpu(x, t) - yy(x, t); };
  return c;
}

double brute_force_y(const ManufacturedCase& c, double x, double t, int resolution) {
  if (resolution < 1) throw std::invalid_argument("brute_force_y: resolution must be >= 1");
  if (t == 0.0) return 0.0;
  double hs = t / resolution;
  double acc = 0.5 * (c.kernel.g(t) * c.delta_p_u(x, 0.0) + c.kernel.g(0.0) * c.delta_p_u(x, t));
  for (int i = 1; i < resolution; ++i) {
    double s = i * hs;
    acc += c.kernel.g(t - s) * c.delta_p_u(x, s);
  }
  return acc * hs;
}

bool CaseCheck::pass(double tol) const {
  return max_pde_residual <= tol && max_y0 <= tol && max_oracle_gap <= tol;
}

CaseCheck validate_case(const ManufacturedCase& c, int oracle_resolution) {
  CaseCheck chk;
  for (int i = 1; i <= 20; ++i) {
    double x = c.a + (c.b - c.a) * i / 21.0;
    chk.max_y0 = std::max(chk.max_y0, std::abs(c.y(x, 0.0)));
    for (int j = 1; j <= 20; ++j) {
      double t = c.T * j / 20.0;
      double r = c.u_t(x, t) - c.delta_p_u(x, t) - c.y(x, t) - c.f(x, t);
      chk.max_pde_residual = std::max(chk.max_pde_residual, std::abs(r));
    }
  }
  if (oracle_resolution > 0) {
    for (int i = 1; i <= 5; ++i) {
      double x = c.a + (c.b - c.a) * i / 6.0;
      for (int j = 1; j <= 5; ++j) {
        double t = c.T * j / 5.0;
        double gap = std::abs(c.y(x, t) - brute_force_y(c, x, t, oracle_resolution));
        chk.max_oracle_gap = std::max(chk.max_oracle_gap, gap);
      }
    }
  }
  return chk;
}

double ConvergenceTable::fitted_order_u() const {
  std::vector<double> lx, ly;
  for (const StudyLevel& lev : levels) {
    lx.push_back(std::log(lev.param));
    ly.push_back(std::log(lev.err_u));
  }
  if (lx.size() < 2) return std::nan("");
  double mx = 0, my = 0;
  for (size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= lx.size();
  my /= ly.size();
  double num = 0, den = 0;
  for (size_t i = 0; i < lx.size(); ++i) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  return num / den;
}

double ConvergenceTable::fitted_order_y() const {
  ConvergenceTable t;
  t.levels = levels;
  for (StudyLevel& lev : t.levels) lev.err_u = lev.err_y;
  return t.fitted_order_u();
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void ConvergenceTable::write_csv(std::ostream& os) const {
  os << (axis == Axis::space ? "h" : "delta") << ",err_u,err_y,eoc_u,eoc_y\n";
  for (size_t i = 0; i < levels.size(); ++i) {
    os << fmt(levels[i].param) << ',' << fmt(levels[i].err_u) << ',' << fmt(levels[i].err_y)
       << ',' << (i == 0 ? "nan" : fmt(eoc_u[i - 1])) << ','
       << (i == 0 ? "nan" : fmt(eoc_y[i - 1])) << '\n';
  }
}

namespace {

StudyLevel run_level(const ManufacturedCase& c, int r, int m, int n_steps, bool spatial,
                     const StudyOptions& opts) {
  FeSpace s = build_space(c.a, c.b, m, r, opts.quad_points);
  ProblemSpec prob = c.problem();
  std::vector<StepDiagnostics> diags;
  History hist = run(prob, s, n_steps, opts.solver, &diags);
  StudyLevel lev;
  lev.m = m;
  lev.n_steps = n_steps;
  lev.param = spatial ? s.h() : prob.T / n_steps;
  lev.err_u = l2_error(hist.u(n_steps), c.u, c.T, s);
  lev.err_y = l2_error(hist.y(n_steps), c.y, c.T, s);
  BandedSpdMatrix M = assemble_mass(s);
  for (int j = 0; j <= n_steps; ++j) {
    lev.max_u_norm = std::max(lev.max_u_norm, mass_norm(M, hist.u(j)));
    lev.max_y_norm = std::max(lev.max_y_norm, mass_norm(M, hist.y(j)));
  }
  for (const StepDiagnostics& d : diags) lev.total_iterations += d.iterations;
  lev.delta_coefficient = diags.empty() ? 0.0 : diags.front().delta_coefficient;
  return lev;
}

ConvergenceTable run_ladder(const ManufacturedCase& c, int r,
                            const std::vector<std::pair<int, int>>& mn,
                            ConvergenceTable::Axis axis, const StudyOptions& opts) {
  // A broken case should fail loudly before any solve starts.
  CaseCheck chk = validate_case(c, 0);
  if (!chk.pass())
    throw std::invalid_argument("study: case " + c.name + " fails its consistency check; " +
                                "max PDE residual " + std::to_string(chk.max_pde_residual));
  const int L = static_cast<int>(mn.size());
  if (L == 0) throw std::invalid_argument("study: empty refinement ladder");
  bool spatial = axis == ConvergenceTable::Axis::space;
  std::vector<StudyLevel> results(L);
  std::vector<std::exception_ptr> errors(L);
  auto work_one = [&](int i) {
    try {
      results[i] = run_level(c, r, mn[i].first, mn[i].second, spatial, opts);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };
  int n_threads = std::clamp(opts.threads, 1, L);
  if (n_threads == 1) {
    for (int i = 0; i < L; ++i) work_one(i);
  } else {
    // levels are independent; results land in ladder slots, so the outcome
    // does not depend on scheduling
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t)
      pool.emplace_back([&] {
        for (int i = next.fetch_add(1); i < L; i = next.fetch_add(1)) work_one(i);
      });
    for (std::thread& t : pool) t.join();
  }
  for (int i = 0; i < L; ++i) {
    if (!errors[i]) continue;
    std::string where = "level m=" + std::to_string(mn[i].first) +
                        " N=" + std::to_string(mn[i].second) + ": ";
    try {
      std::rethrow_exception(errors[i]);
    } catch (const NonConvergence& e) {
      throw NonConvergence(where + e.what(), e.iterations, e.last_increment);
    } catch (const std::exception& e) {
      throw std::runtime_error(where + e.what());
    }
  }
  ConvergenceTable table;
  table.axis = axis;
  table.levels = std::move(results);
  for (int i = 0; i + 1 < L; ++i) {
    const StudyLevel& c0 = table.levels[i];
    const StudyLevel& c1 = table.levels[i + 1];
    double dl = std::log(c0.param / c1.param);
    table.eoc_u.push_back(std::log(c0.err_u / c1.err_u) / dl);
    table.eoc_y.push_back(std::log(c0.err_y / c1.err_y) / dl);
  }
  return table;
}

}  // namespace

ConvergenceTable spatial_study(const ManufacturedCase& c, int r,
                               const std::vector<int>& m_list, const StudyOptions& opts) {
  std::vector<std::pair<int, int>> mn;
  for (int m : m_list) {
    if (m < 1) throw std::invalid_argument("spatial_study: m must be >= 1");
    int n = opts.n_fixed > 0 ? opts.n_fixed : opts.n_per_m * m;
    if (n < 1) throw std::invalid_argument("spatial_study: step count must be >= 1");
    mn.emplace_back(m, n);
  }
  return run_ladder(c, r, mn, ConvergenceTable::Axis::space, opts);
}

ConvergenceTable temporal_study(const ManufacturedCase& c, int r, int m_fine,
                                const std::vector<int>& n_list, const StudyOptions& opts) {
  if (m_fine < 1) throw std::invalid_argument("temporal_study: m_fine must be >= 1");
  std::vector<std::pair<int, int>> mn;
  for (int n : n_list) {
    if (n < 1) throw std::invalid_argument("temporal_study: step counts must be >= 1");
    mn.emplace_back(m_fine, n);
  }
  return run_ladder(c, r, mn, ConvergenceTable::Axis::time, opts);
}

}  // namespace plapmem
