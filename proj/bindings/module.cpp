// pybind11 surface: spaces and interpolation, kernels and the history
// quadrature, manufactured cases with their validation oracle, single solves
// and refinement studies.  Vectors cross the boundary as plain lists; the
// heavy lifting stays on the C++ side.
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "plapmem/verification.hpp"

namespace py = pybind11;
using namespace plapmem;

namespace {

SolverOptions make_opts(const std::string& method, double tol, int max_iter,
                        double relaxation, double eps_reg) {
  SolverOptions opts;
  if (method == "picard")
    opts.method = NonlinearMethod::picard;
  else if (method == "newton")
    opts.method = NonlinearMethod::newton;
  else
    throw ConfigError("method must be \"picard\" or \"newton\", got \"" + method + "\"");
  opts.tol = tol;
  opts.max_iter = max_iter;
  opts.relaxation = relaxation;
  opts.eps_reg = eps_reg;
  opts.validate();
  return opts;
}

py::dict table_to_dict(const ConvergenceTable& t) {
  py::list param, err_u, err_y, max_u, max_y, iters;
  for (const StudyLevel& lev : t.levels) {
    param.append(lev.param);
    err_u.append(lev.err_u);
    err_y.append(lev.err_y);
    max_u.append(lev.max_u_norm);
    max_y.append(lev.max_y_norm);
    iters.append(lev.total_iterations);
  }
  py::dict out;
  out["param"] = param;
  out["err_u"] = err_u;
  out["err_y"] = err_y;
  out["eoc_u"] = t.eoc_u;
  out["eoc_y"] = t.eoc_y;
  out["max_u_norm"] = max_u;
  out["max_y_norm"] = max_y;
  out["iterations"] = iters;
  out["fitted_order_u"] = t.fitted_order_u();
  out["fitted_order_y"] = t.fitted_order_y();
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "finite element solver for the parabolic p-Laplacian equation "
            "with nonlinear memory";

  py::register_exception<InadmissibleStep>(m, "InadmissibleStepError");
  py::register_exception<NonConvergence>(m, "NonConvergenceError");
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<UnsupportedExponent>(m, "UnsupportedExponentError",
                                              PyExc_ValueError);
  py::register_exception<NonFiniteInput>(m, "NonFiniteInputError", PyExc_ValueError);
  py::register_exception<MissingHistory>(m, "MissingHistoryError", PyExc_IndexError);

  py::class_<FeSpace>(m, "FeSpace")
      .def_property_readonly("n_dof", &FeSpace::n_dof)
      .def_property_readonly("h", &FeSpace::h)
      .def_property_readonly("r", &FeSpace::r)
      .def_property_readonly("m", [](const FeSpace& s) { return s.mesh.m; })
      .def("node_positions", [](const FeSpace& s) { return node_positions(s); })
      .def("__repr__", [](const FeSpace& s) {
        return "FeSpace(m=" + std::to_string(s.mesh.m) + ", r=" + std::to_string(s.r()) +
               ", n_dof=" + std::to_string(s.n_dof()) + ")";
      });

  m.def("build_space", &build_space, py::arg("a"), py::arg("b"), py::arg("m"),
        py::arg("r"), py::arg("quad_points") = 0);
  m.def("interpolate",
        [](const std::function<double(double)>& f, const FeSpace& s) {
          return interpolate(f, s);
        },
        py::arg("func"), py::arg("space"));
  m.def("evaluate", &evaluate, py::arg("u"), py::arg("space"), py::arg("x"));
  m.def("evaluate_deriv", &evaluate_deriv, py::arg("u"), py::arg("space"), py::arg("x"));
  m.def("l2_norm", &l2_norm, py::arg("u"), py::arg("space"));
  m.def("l2_error",
        [](const CoeffVec& u, const std::function<double(double, double)>& exact, double t,
           const FeSpace& s) { return l2_error(u, exact, t, s); },
        py::arg("u"), py::arg("exact"), py::arg("t"), py::arg("space"));
  m.def("node_values", &node_values, py::arg("u"), py::arg("space"));

  py::class_<Kernel>(m, "Kernel")
      .def_static("exponential", &Kernel::exponential, py::arg("rate"),
                  py::arg("scale") = 1.0)
      .def_static("constant", &Kernel::constant, py::arg("value"))
      .def_static("polynomial", &Kernel::polynomial, py::arg("coeffs"))
      .def_static("zero", &Kernel::zero)
      .def_readonly("g0", &Kernel::g0)
      .def("g", [](const Kernel& k, double t) { return k.g(t); }, py::arg("t"))
      .def("g_prime", [](const Kernel& k, double t) { return k.g_prime(t); }, py::arg("t"));

  py::class_<QuadEntry>(m, "QuadEntry")
      .def_readonly("node", &QuadEntry::node)
      .def_readonly("arg", &QuadEntry::arg)
      .def_readonly("weight", &QuadEntry::weight);
  py::class_<QuadWeights>(m, "QuadWeights")
      .def_readonly("k", &QuadWeights::k)
      .def_readonly("delta", &QuadWeights::delta)
      .def_readonly("entries", &QuadWeights::entries)
      .def("weight_sum", &QuadWeights::weight_sum);
  m.def("quad_weights", &quad_weights, py::arg("k"), py::arg("delta"));

  m.def("check_delta_admissible", &check_delta_admissible, py::arg("kernel"),
        py::arg("delta"));

  py::class_<CaseCheck>(m, "CaseCheck")
      .def_readonly("max_pde_residual", &CaseCheck::max_pde_residual)
      .def_readonly("max_y0", &CaseCheck::max_y0)
      .def_readonly("max_oracle_gap", &CaseCheck::max_oracle_gap)
      .def("passes", &CaseCheck::pass, py::arg("tol") = 1e-8);

  py::class_<ManufacturedCase>(m, "ManufacturedCase")
      .def_readonly("name", &ManufacturedCase::name)
      .def_readonly("p", &ManufacturedCase::p)
      .def_readonly("T", &ManufacturedCase::T)
      .def("u", [](const ManufacturedCase& c, double x, double t) { return c.u(x, t); },
           py::arg("x"), py::arg("t"))
      .def("y", [](const ManufacturedCase& c, double x, double t) { return c.y(x, t); },
           py::arg("x"), py::arg("t"))
      .def("f", [](const ManufacturedCase& c, double x, double t) { return c.f(x, t); },
           py::arg("x"), py::arg("t"))
      .def("validate",
           [](const ManufacturedCase& c, int resolution) {
             return validate_case(c, resolution);
           },
           py::arg("resolution") = 100000, py::call_guard<py::gil_scoped_release>());

  m.def("case_MS1", &case_MS1, py::arg("p"));
  m.def("case_MS2", &case_MS2, py::arg("p"));
  m.def("brute_force_y", &brute_force_y, py::arg("case"), py::arg("x"), py::arg("t"),
        py::arg("resolution"), py::call_guard<py::gil_scoped_release>());

  m.def("solve_case",
        [](const ManufacturedCase& c, int r, int m_, int n_steps, const std::string& method,
           double tol, int max_iter, double relaxation, double eps_reg, int quad_points) {
          SolverOptions opts = make_opts(method, tol, max_iter, relaxation, eps_reg);
          FeSpace s = build_space(c.a, c.b, m_, r, quad_points);
          std::vector<StepDiagnostics> diags;
          History hist = [&] {
            py::gil_scoped_release nogil;
            return run(c.problem(), s, n_steps, opts, &diags);
          }();
          int total = 0, peak = 0;
          for (const StepDiagnostics& d : diags) {
            total += d.iterations;
            peak = std::max(peak, d.iterations);
          }
          py::dict out;
          out["x"] = node_positions(s);
          out["u"] = node_values(hist.u(n_steps), s);
          out["y"] = node_values(hist.y(n_steps), s);
          out["err_u"] = l2_error(hist.u(n_steps), c.u, c.T, s);
          out["err_y"] = l2_error(hist.y(n_steps), c.y, c.T, s);
          out["iterations_total"] = total;
          out["iterations_max"] = peak;
          out["delta_coefficient"] = diags.front().delta_coefficient;
          return out;
        },
        py::arg("case"), py::arg("r"), py::arg("m"), py::arg("n_steps"),
        py::arg("method") = "picard", py::arg("tol") = 1e-10, py::arg("max_iter") = 100,
        py::arg("relaxation") = 1.0, py::arg("eps_reg") = 1e-12, py::arg("quad_points") = 0);

  auto study_opts = [](const std::string& method, double tol, int max_iter,
                       double relaxation, double eps_reg, int n_fixed, int n_per_m,
                       int quad_points, int threads) {
    StudyOptions opts;
    opts.solver = make_opts(method, tol, max_iter, relaxation, eps_reg);
    opts.n_fixed = n_fixed;
    opts.n_per_m = n_per_m;
    opts.quad_points = quad_points;
    opts.threads = threads;
    return opts;
  };

  m.def("spatial_study",
        [study_opts](const ManufacturedCase& c, int r, const std::vector<int>& m_list,
                     const std::string& method, double tol, int max_iter, double relaxation,
                     double eps_reg, int n_fixed, int n_per_m, int quad_points, int threads) {
          StudyOptions opts = study_opts(method, tol, max_iter, relaxation, eps_reg, n_fixed,
                                         n_per_m, quad_points, threads);
          ConvergenceTable t = [&] {
            py::gil_scoped_release nogil;
            return spatial_study(c, r, m_list, opts);
          }();
          return table_to_dict(t);
        },
        py::arg("case"), py::arg("r"), py::arg("m_list"), py::arg("method") = "picard",
        py::arg("tol") = 1e-10, py::arg("max_iter") = 100, py::arg("relaxation") = 1.0,
        py::arg("eps_reg") = 1e-12, py::arg("n_fixed") = 0, py::arg("n_per_m") = 4,
        py::arg("quad_points") = 0, py::arg("threads") = 1);

  m.def("temporal_study",
        [study_opts](const ManufacturedCase& c, int r, int m_fine,
                     const std::vector<int>& n_list, const std::string& method, double tol,
                     int max_iter, double relaxation, double eps_reg, int quad_points,
                     int threads) {
          StudyOptions opts = study_opts(method, tol, max_iter, relaxation, eps_reg, 0, 4,
                                         quad_points, threads);
          ConvergenceTable t = [&] {
            py::gil_scoped_release nogil;
            return temporal_study(c, r, m_fine, n_list, opts);
          }();
          return table_to_dict(t);
        },
        py::arg("case"), py::arg("r"), py::arg("m"), py::arg("n_list"),
        py::arg("method") = "picard", py::arg("tol") = 1e-10, py::arg("max_iter") = 100,
        py::arg("relaxation") = 1.0, py::arg("eps_reg") = 1e-12, py::arg("quad_points") = 0,
        py::arg("threads") = 1);
}
