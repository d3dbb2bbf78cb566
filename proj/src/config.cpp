#include "plapmem/config.hpp"

#include <cmath>
#include <set>

namespace plapmem {

using nlohmann::json;

namespace {

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& ctx) {
  for (const auto& item : obj.items())
    if (!allowed.count(item.key()))
      throw ConfigError("unknown key \"" + item.key() + "\" in " + ctx);
}

const json& field(const json& obj, const char* key, const std::string& ctx) {
  if (!obj.contains(key)) throw ConfigError("missing required key \"" + std::string(key) +
                                            "\" in " + ctx);
  return obj.at(key);
}

double num_at(const json& obj, const char* key, const std::string& ctx) {
  const json& v = field(obj, key, ctx);
  if (!v.is_number()) throw ConfigError("key \"" + std::string(key) + "\" in " + ctx +
                                        " must be a number");
  return v.get<double>();
}

double num_or(const json& obj, const char* key, const std::string& ctx, double def) {
  return obj.contains(key) ? num_at(obj, key, ctx) : def;
}

int int_at(const json& obj, const char* key, const std::string& ctx) {
  const json& v = field(obj, key, ctx);
  if (!v.is_number_integer()) throw ConfigError("key \"" + std::string(key) + "\" in " + ctx +
                                                " must be an integer");
  return v.get<int>();
}

int int_or(const json& obj, const char* key, const std::string& ctx, int def) {
  return obj.contains(key) ? int_at(obj, key, ctx) : def;
}

std::string str_at(const json& obj, const char* key, const std::string& ctx) {
  const json& v = field(obj, key, ctx);
  if (!v.is_string()) throw ConfigError("key \"" + std::string(key) + "\" in " + ctx +
                                        " must be a string");
  return v.get<std::string>();
}

std::vector<int> int_list_at(const json& obj, const char* key, const std::string& ctx) {
  const json& v = field(obj, key, ctx);
  if (!v.is_array() || v.empty())
    throw ConfigError("key \"" + std::string(key) + "\" in " + ctx +
                      " must be a non-empty array of integers");
  std::vector<int> out;
  for (const json& e : v) {
    if (!e.is_number_integer())
      throw ConfigError("key \"" + std::string(key) + "\" in " + ctx +
                        " must contain integers only");
    out.push_back(e.get<int>());
  }
  return out;
}

KernelSpec parse_kernel(const json& obj, const std::string& ctx) {
  if (!obj.is_object()) throw ConfigError(ctx + " must be an object");
  KernelSpec ks;
  ks.type = str_at(obj, "type", ctx);
  if (ks.type == "exp") {
    check_keys(obj, {"type", "rate", "scale"}, ctx);
    ks.rate = num_or(obj, "rate", ctx, 1.0);
    ks.scale = num_or(obj, "scale", ctx, 1.0);
  } else if (ks.type == "const") {
    check_keys(obj, {"type", "value"}, ctx);
    ks.value = num_at(obj, "value", ctx);
  } else if (ks.type == "poly") {
    check_keys(obj, {"type", "coeffs"}, ctx);
    const json& v = field(obj, "coeffs", ctx);
    if (!v.is_array() || v.empty())
      throw ConfigError("key \"coeffs\" in " + ctx + " must be a non-empty number array");
    for (const json& e : v) {
      if (!e.is_number()) throw ConfigError("key \"coeffs\" in " + ctx + " must hold numbers");
      ks.coeffs.push_back(e.get<double>());
    }
  } else if (ks.type == "zero") {
    check_keys(obj, {"type"}, ctx);
  } else {
    throw ConfigError(ctx + ": kernel type \"" + ks.type +
                      "\" is not one of exp, const, poly, zero");
  }
  return ks;
}

SolverOptions parse_solver(const json& obj) {
  if (!obj.is_object()) throw ConfigError("\"solver\" must be an object");
  check_keys(obj, {"method", "tol", "max_iter", "relaxation", "eps_reg"}, "\"solver\"");
  SolverOptions so;
  if (obj.contains("method")) {
    std::string m = str_at(obj, "method", "\"solver\"");
    if (m == "picard")
      so.method = NonlinearMethod::picard;
    else if (m == "newton")
      so.method = NonlinearMethod::newton;
    else
      throw ConfigError("solver.method must be \"picard\" or \"newton\", got \"" + m + "\"");
  }
  so.tol = num_or(obj, "tol", "\"solver\"", so.tol);
  so.max_iter = int_or(obj, "max_iter", "\"solver\"", so.max_iter);
  so.relaxation = num_or(obj, "relaxation", "\"solver\"", so.relaxation);
  so.eps_reg = num_or(obj, "eps_reg", "\"solver\"", so.eps_reg);
  so.validate();  // throws ConfigError on range problems
  return so;
}

InlineProblem parse_problem(const json& obj) {
  if (!obj.is_object()) throw ConfigError("\"problem\" must be an object");
  check_keys(obj, {"p", "T", "domain", "kernel", "u0", "f"}, "\"problem\"");
  InlineProblem ip;
  ip.p = num_at(obj, "p", "\"problem\"");
  if (!(ip.p >= 2.0)) throw ConfigError("problem.p must be >= 2, got " + std::to_string(ip.p));
  ip.T = num_or(obj, "T", "\"problem\"", 1.0);
  if (!(ip.T > 0.0)) throw ConfigError("problem.T must be > 0");
  if (obj.contains("domain")) {
    const json& d = obj.at("domain");
    if (!d.is_array() || d.size() != 2 || !d[0].is_number() || !d[1].is_number())
      throw ConfigError("problem.domain must be a [a, b] number pair");
    ip.a = d[0].get<double>();
    ip.b = d[1].get<double>();
    if (!(ip.a < ip.b)) throw ConfigError("problem.domain must satisfy a < b");
  }
  ip.kernel = parse_kernel(field(obj, "kernel", "\"problem\""), "\"problem.kernel\"");
  ip.u0_name = obj.contains("u0") ? str_at(obj, "u0", "\"problem\"") : "zero";
  ip.f_name = obj.contains("f") ? str_at(obj, "f", "\"problem\"") : "zero";
  static const std::set<std::string> u0s = {"zero", "sin_pi", "parabola"};
  static const std::set<std::string> fs = {"zero", "one"};
  if (!u0s.count(ip.u0_name))
    throw ConfigError("problem.u0 \"" + ip.u0_name + "\" is not one of zero, sin_pi, parabola");
  if (!fs.count(ip.f_name))
    throw ConfigError("problem.f \"" + ip.f_name + "\" is not one of zero, one");
  return ip;
}

void parse_case(const json& root, RunConfig& cfg, bool required) {
  if (root.contains("case")) {
    cfg.case_name = str_at(root, "case", "config");
    if (cfg.case_name != "MS1" && cfg.case_name != "MS2")
      throw ConfigError("case \"" + cfg.case_name + "\" is not one of MS1, MS2");
    cfg.p = num_at(root, "p", "config");
    if (!(cfg.p >= 2.0)) throw ConfigError("p must be >= 2, got " + std::to_string(cfg.p));
    if (cfg.case_name == "MS1" && !(cfg.p > 2.0))
      throw ConfigError("case MS1 is defined for p > 2 only, got p=" + std::to_string(cfg.p));
  } else if (required) {
    throw ConfigError("this mode requires a named \"case\" (MS1 or MS2) with \"p\"");
  }
}

int parse_quad_points(const json& root) {
  int q = int_or(root, "quad_points", "config", 0);
  if (q != 0 && (q < 1 || q > 16))
    throw ConfigError("quad_points must be 0 (default) or in 1..16, got " + std::to_string(q));
  return q;
}

int parse_r(const json& root) {
  int r = int_or(root, "r", "config", 1);
  if (r < 1 || r > 4) throw ConfigError("r must be in 1..4, got " + std::to_string(r));
  return r;
}

}  // namespace

Kernel KernelSpec::make() const {
  if (type == "exp") return Kernel::exponential(rate, scale);
  if (type == "const") return Kernel::constant(value);
  if (type == "poly") return Kernel::polynomial(coeffs);
  return Kernel::zero();
}

json KernelSpec::to_json() const {
  json j{{"type", type}};
  if (type == "exp") {
    j["rate"] = rate;
    j["scale"] = scale;
  } else if (type == "const") {
    j["value"] = value;
  } else if (type == "poly") {
    j["coeffs"] = coeffs;
  }
  return j;
}

ProblemSpec InlineProblem::make() const {
  ProblemSpec prob;
  prob.p = p;
  prob.a = a;
  prob.b = b;
  prob.T = T;
  prob.kernel = kernel.make();
  double a0 = a, b0 = b;
  if (u0_name == "sin_pi")
    prob.u0 = [a0, b0](double x) { return std::sin(M_PI * (x - a0) / (b0 - a0)); };
  else if (u0_name == "parabola")
    prob.u0 = [a0, b0](double x) { return (x - a0) * (b0 - x); };
  else
    prob.u0 = [](double) { return 0.0; };
  if (f_name == "one")
    prob.f = [](double, double) { return 1.0; };
  else
    prob.f = [](double, double) { return 0.0; };
  return prob;
}

ManufacturedCase RunConfig::make_case() const {
  if (case_name.empty())
    throw ConfigError("mode " + mode + " requires a named case with an exact solution");
  return case_name == "MS1" ? case_MS1(p) : case_MS2(p);
}

ProblemSpec RunConfig::make_problem() const {
  if (!case_name.empty()) return make_case().problem();
  if (!problem) throw ConfigError("config has neither \"case\" nor \"problem\"");
  return problem->make();
}

json RunConfig::resolved() const {
  json j{{"mode", mode}, {"r", r}, {"quad_points", quad_points}};
  if (!case_name.empty()) {
    j["case"] = case_name;
    j["p"] = p;
  } else if (problem) {
    j["problem"] = {{"p", problem->p},      {"T", problem->T},
                    {"domain", {problem->a, problem->b}},
                    {"kernel", problem->kernel.to_json()},
                    {"u0", problem->u0_name}, {"f", problem->f_name}};
  }
  if (mode == "solve") {
    j["m"] = m;
    j["N"] = n_steps;
  } else if (mode == "study-space") {
    j["m_list"] = m_list;
    if (n_steps > 0)
      j["N"] = n_steps;
    else
      j["N_per_m"] = n_per_m;
  } else if (mode == "study-time") {
    j["m"] = m;
    j["N_list"] = n_list;
  } else if (mode == "validate") {
    j["resolution"] = resolution;
    j.erase("r");
    j.erase("quad_points");
  }
  if (mode != "validate")
    j["solver"] = {{"method", solver.method == NonlinearMethod::picard ? "picard" : "newton"},
                   {"tol", solver.tol},
                   {"max_iter", solver.max_iter},
                   {"relaxation", solver.relaxation},
                   {"eps_reg", solver.eps_reg}};
  return j;
}

RunConfig parse_config(const std::string& text, const std::string& mode) {
  static const std::set<std::string> modes = {"solve", "study-space", "study-time", "validate"};
  if (!modes.count(mode)) throw ConfigError("unknown mode \"" + mode + "\"");
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config root must be a JSON object");
  RunConfig cfg;
  cfg.mode = mode;
  if (root.contains("mode")) {
    std::string m = str_at(root, "mode", "config");
    if (m != mode)
      throw ConfigError("config mode \"" + m + "\" does not match subcommand \"" + mode + "\"");
  }
  if (mode == "solve") {
    check_keys(root, {"mode", "case", "p", "problem", "r", "m", "N", "solver", "quad_points"},
               "config");
    parse_case(root, cfg, false);
    if (cfg.case_name.empty()) {
      if (!root.contains("problem"))
        throw ConfigError("solve needs either \"case\"+\"p\" or an inline \"problem\"");
      cfg.problem = parse_problem(root.at("problem"));
    } else if (root.contains("problem")) {
      throw ConfigError("give either \"case\" or \"problem\", not both");
    }
    cfg.r = parse_r(root);
    cfg.m = int_at(root, "m", "config");
    if (cfg.m < 1) throw ConfigError("m must be >= 1, got " + std::to_string(cfg.m));
    cfg.n_steps = int_at(root, "N", "config");
    if (cfg.n_steps < 1) throw ConfigError("N must be >= 1, got " + std::to_string(cfg.n_steps));
  } else if (mode == "study-space") {
    check_keys(root, {"mode", "case", "p", "r", "m_list", "N", "N_per_m", "solver",
                      "quad_points"},
               "config");
    parse_case(root, cfg, true);
    cfg.r = parse_r(root);
    cfg.m_list = int_list_at(root, "m_list", "config");
    for (int m : cfg.m_list)
      if (m < 1) throw ConfigError("m_list entries must be >= 1");
    if (root.contains("N") && root.contains("N_per_m"))
      throw ConfigError("give either \"N\" (fixed) or \"N_per_m\", not both");
    cfg.n_steps = int_or(root, "N", "config", 0);
    if (root.contains("N") && cfg.n_steps < 1) throw ConfigError("N must be >= 1");
    cfg.n_per_m = int_or(root, "N_per_m", "config", 4);
    if (cfg.n_per_m < 1) throw ConfigError("N_per_m must be >= 1");
  } else if (mode == "study-time") {
    check_keys(root, {"mode", "case", "p", "r", "m", "N_list", "solver", "quad_points"},
               "config");
    parse_case(root, cfg, true);
    cfg.r = parse_r(root);
    cfg.m = int_at(root, "m", "config");
    if (cfg.m < 1) throw ConfigError("m must be >= 1, got " + std::to_string(cfg.m));
    cfg.n_list = int_list_at(root, "N_list", "config");
    for (int n : cfg.n_list)
      if (n < 1) throw ConfigError("N_list entries must be >= 1");
  } else {  // validate
    check_keys(root, {"mode", "case", "p", "resolution"}, "config");
    parse_case(root, cfg, true);
    cfg.resolution = int_or(root, "resolution", "config", 100000);
    if (cfg.resolution < 1) throw ConfigError("resolution must be >= 1");
  }
  if (root.contains("solver")) cfg.solver = parse_solver(root.at("solver"));
  if (mode != "validate") cfg.quad_points = parse_quad_points(root);
  return cfg;
}

}  // namespace plapmem
