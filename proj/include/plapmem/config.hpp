// JSON run configuration: strict parsing (unknown keys are errors) and
// defaulted, serializable form for meta.json.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "plapmem/verification.hpp"

namespace plapmem {

struct KernelSpec {
  std::string type;  // "exp" | "const" | "poly" | "zero"
  double rate = 1.0, scale = 1.0;   // exp: scale * e^{-rate t}
  double value = 0.0;               // const
  std::vector<double> coeffs;       // poly: sum c_i t^i

  Kernel make() const;
  nlohmann::json to_json() const;
};

// Inline problem description used when no named manufactured case is given.
// u0 and f are chosen from small named families so configs stay declarative.
struct InlineProblem {
  double p = 2.0;
  double T = 1.0;
  double a = 0.0, b = 1.0;
  KernelSpec kernel;
  std::string u0_name = "zero";  // "zero" | "sin_pi" | "parabola"
  std::string f_name = "zero";   // "zero" | "one"

  ProblemSpec make() const;
};

struct RunConfig {
  std::string mode;        // solve | study-space | study-time | validate
  std::string case_name;   // "MS1" | "MS2", empty for inline problems
  double p = 0.0;          // exponent for the named case
  std::optional<InlineProblem> problem;
  int r = 1;
  int m = 0;
  std::vector<int> m_list;
  int n_steps = 0;
  std::vector<int> n_list;
  int n_per_m = 4;
  SolverOptions solver;
  int quad_points = 0;
  int resolution = 100000;  // validate-mode oracle panels

  // Builds the case (throws ConfigError for inline-problem modes that need
  // exact solutions, i.e. studies/validate without a named case).
  ManufacturedCase make_case() const;
  ProblemSpec make_problem() const;
  nlohmann::json resolved() const;  // defaults filled in, for meta.json
};

// Parses and validates the JSON text for the given CLI mode.  All structural
// or range problems throw ConfigError with the offending key in the message.
RunConfig parse_config(const std::string& text, const std::string& mode);

}  // namespace plapmem
