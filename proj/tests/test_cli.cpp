#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "plapmem/cli.hpp"
#include "plapmem/config.hpp"

using namespace plapmem;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path dir =
      fs::temp_directory_path() / ("plapmem_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  fs::path p = dir / "config.json";
  std::ofstream out(p);
  out << text;
  return p;
}

std::string read_text(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_meta(const fs::path& dir) { return json::parse(read_text(dir / "meta.json")); }

// run_cli prints through std::cout; grab it so tests can assert on it
struct CoutCapture {
  std::ostringstream ss;
  std::streambuf* old;
  CoutCapture() : old(std::cout.rdbuf(ss.rdbuf())) {}
  ~CoutCapture() { std::cout.rdbuf(old); }
  std::string text() const { return ss.str(); }
};

int cli(std::initializer_list<std::string> args) {
  return run_cli(std::vector<std::string>(args));
}

}  // namespace

TEST_CASE("parse_config accepts a full solve configuration") {
  RunConfig cfg = parse_config(R"({
    "case": "MS2", "p": 3.0, "r": 2, "m": 16, "N": 8,
    "solver": {"method": "newton", "tol": 1e-9, "max_iter": 50, "relaxation": 0.8},
    "quad_points": 6
  })",
                               "solve");
  CHECK(cfg.case_name == "MS2");
  CHECK(cfg.p == 3.0);
  CHECK(cfg.r == 2);
  CHECK(cfg.m == 16);
  CHECK(cfg.n_steps == 8);
  CHECK(cfg.solver.method == NonlinearMethod::newton);
  CHECK(cfg.solver.tol == 1e-9);
  CHECK(cfg.solver.max_iter == 50);
  CHECK(cfg.solver.relaxation == 0.8);
  CHECK(cfg.quad_points == 6);
  // defaults
  RunConfig d = parse_config(R"({"case": "MS2", "p": 2, "m": 4, "N": 2})", "solve");
  CHECK(d.r == 1);
  CHECK(d.solver.method == NonlinearMethod::picard);
  CHECK(d.solver.tol == 1e-10);
  CHECK(d.solver.max_iter == 100);
}

TEST_CASE("parse_config rejects malformed input") {
  auto bad = [](const std::string& text, const std::string& mode) {
    CHECK_THROWS_AS(parse_config(text, mode), ConfigError);
  };
  bad("{", "solve");                                                   // not JSON
  bad("[1,2]", "solve");                                               // not an object
  bad(R"({"case":"MS2","p":2,"m":4,"N":2,"foo":1})", "solve");         // unknown key
  bad(R"({"case":"MS2","p":2,"N":2})", "solve");                       // missing m
  bad(R"({"case":"MS2","p":2,"m":0,"N":2})", "solve");                 // m < 1
  bad(R"({"case":"MS2","p":2,"m":2.5,"N":2})", "solve");               // non-integer m
  bad(R"({"case":"MS3","p":2,"m":4,"N":2})", "solve");                 // unknown case
  bad(R"({"case":"MS2","p":1.5,"m":4,"N":2})", "solve");               // p < 2
  bad(R"({"case":"MS1","p":2,"m":4,"N":2})", "solve");                 // MS1 needs p > 2
  bad(R"({"case":"MS2","p":2,"m":4,"N":2,"r":5})", "solve");           // r out of range
  bad(R"({"m":4,"N":2})", "solve");                                    // no case, no problem
  bad(R"({"mode":"validate","case":"MS2","p":2,"m":4,"N":2})", "solve");  // mode clash
  bad(R"({"case":"MS2","p":2,"m":4,"N":2,"solver":{"method":"sor"}})", "solve");
  bad(R"({"case":"MS2","p":2,"m":4,"N":2,"solver":{"relaxation":0}})", "solve");
  bad(R"({"case":"MS2","p":2,"m":4,"N":2,"quad_points":17})", "solve");
  // case and inline problem are mutually exclusive
  bad(R"({"case":"MS2","p":2,"m":4,"N":2,
          "problem":{"p":2,"kernel":{"type":"zero"}}})",
      "solve");
  // inline problem guards
  bad(R"({"m":4,"N":2,"problem":{"p":2,"kernel":{"type":"gauss"}}})", "solve");
  bad(R"({"m":4,"N":2,"problem":{"p":2,"kernel":{"type":"zero"},"u0":"wavelet"}})", "solve");
  bad(R"({"m":4,"N":2,"problem":{"p":2,"kernel":{"type":"exp","value":3}}})", "solve");
  // study configs
  bad(R"({"case":"MS2","p":2,"m_list":[4,8],"N":4,"N_per_m":2})", "study-space");
  bad(R"({"case":"MS2","p":2,"m_list":[]})", "study-space");
  bad(R"({"case":"MS2","p":2,"m_list":[4,0]})", "study-space");
  bad(R"({"p":2,"m_list":[4]})", "study-space");  // study needs a named case
  bad(R"({"case":"MS2","p":2,"m":8,"N_list":[4,-1]})", "study-time");
  bad(R"({"case":"MS2","p":2,"resolution":0})", "validate");
  bad(R"({"case":"MS2","p":2,"solver":{}})", "validate");  // no solver in validate
}

TEST_CASE("resolved config echoes the effective settings") {
  RunConfig cfg = parse_config(R"({"case":"MS2","p":2,"m":4,"N":2})", "solve");
  json j = cfg.resolved();
  CHECK(j["mode"] == "solve");
  CHECK(j["case"] == "MS2");
  CHECK(j["m"] == 4);
  CHECK(j["N"] == 2);
  CHECK(j["solver"]["method"] == "picard");
  CHECK(j["solver"]["tol"] == 1e-10);

  RunConfig v = parse_config(R"({"case":"MS1","p":3})", "validate");
  json jv = v.resolved();
  CHECK(jv["resolution"] == 100000);
  CHECK(!jv.contains("solver"));
  CHECK(!jv.contains("r"));
}

TEST_CASE("cli solve writes solution.csv and meta.json") {
  fs::path dir = fresh_dir("solve_case");
  fs::path cfg = write_config(dir, R"({"case":"MS2","p":2,"m":8,"N":4})");
  CoutCapture cap;
  int rc = cli({"solve", "--config", cfg.string(), "--out", dir.string(), "--seed", "42"});
  CHECK(rc == 0);
  CHECK(cap.text().rfind("solve case=MS2", 0) == 0);

  std::string csv = read_text(dir / "solution.csv");
  CHECK(csv.rfind("x,U,Y,exact_u,exact_y\n", 0) == 0);
  // 8 elements, r=1: 9 node rows plus the header
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 10);
  CHECK(csv.find("nan") == std::string::npos);  // exact columns are populated

  json meta = read_meta(dir);
  CHECK(meta["mode"] == "solve");
  CHECK(meta["seed"] == 42);
  CHECK(meta["config"]["m"] == 8);
  CHECK(meta["summary"]["iterations_max"] == 1);  // p = 2
  CHECK(meta["summary"]["err_u"].get<double>() < 0.1);
  CHECK(meta["outputs"] == json({"solution.csv", "meta.json"}));
}

TEST_CASE("cli solve handles inline problems without exact columns") {
  fs::path dir = fresh_dir("solve_inline");
  fs::path cfg = write_config(dir, R"({
    "problem": {"p": 2, "kernel": {"type": "zero"}, "u0": "sin_pi"},
    "m": 4, "N": 2
  })");
  CoutCapture cap;
  int rc = cli({"solve", "--config", cfg.string(), "--out", dir.string(), "--quiet"});
  CHECK(rc == 0);
  CHECK(cap.text().empty());
  std::string csv = read_text(dir / "solution.csv");
  CHECK(csv.find(",nan,nan\n") != std::string::npos);
  json meta = read_meta(dir);
  CHECK(!meta["summary"].contains("err_u"));
  CHECK(meta["config"]["problem"]["u0"] == "sin_pi");
}

TEST_CASE("cli exit codes map the failure modes") {
  fs::path dir = fresh_dir("exit_codes");

  // 2: command line problems and config problems
  CHECK(cli({"solve"}) == 2);                    // missing --config
  CHECK(cli({"frobnicate", "--config", "x"}) == 2);
  CHECK(cli({"solve", "--config", (dir / "missing.json").string()}) == 2);
  fs::path bad = write_config(dir, R"({"case":"MS2","p":2,"m":4,"N":2,"bogus":true})");
  CHECK(cli({"solve", "--config", bad.string(), "--out", dir.string()}) == 2);
  fs::path notjson = dir / "notjson.json";
  std::ofstream(notjson) << "{ this is not json";
  CHECK(cli({"solve", "--config", notjson.string(), "--out", dir.string()}) == 2);

  // 4: inadmissible step size (delta = 3 against g(0) = -2)
  fs::path inadm = write_config(dir, R"({
    "problem": {"p": 2, "T": 3, "kernel": {"type": "const", "value": -2}, "u0": "sin_pi"},
    "m": 8, "N": 1
  })");
  CHECK(cli({"solve", "--config", inadm.string(), "--out", dir.string()}) == 4);
  // the same problem at delta = 1 is admissible
  fs::path adm = write_config(dir, R"({
    "problem": {"p": 2, "T": 3, "kernel": {"type": "const", "value": -2}, "u0": "sin_pi"},
    "m": 8, "N": 3
  })");
  CHECK(cli({"solve", "--config", adm.string(), "--out", dir.string(), "--quiet"}) == 0);

  // 3: nonlinear solver failure (plain Picard at p=4 on a stiff ratio)
  fs::path div = write_config(dir, R"({
    "case": "MS2", "p": 4, "m": 8, "N": 32, "solver": {"max_iter": 15}
  })");
  CHECK(cli({"solve", "--config", div.string(), "--out", dir.string()}) == 3);
}

TEST_CASE("cli validate reports the case check") {
  fs::path dir = fresh_dir("validate");
  fs::path cfg = write_config(dir, R"({"case":"MS2","p":3,"resolution":50000})");
  CoutCapture cap;
  int rc = cli({"validate", "--config", cfg.string(), "--out", dir.string()});
  CHECK(rc == 0);
  CHECK(cap.text().find("-> PASS") != std::string::npos);
  json meta = read_meta(dir);
  CHECK(meta["summary"]["pass"] == true);
  CHECK(meta["summary"]["resolution"] == 50000);
  CHECK(meta["summary"]["max_oracle_gap"].get<double>() < 1e-8);
}

TEST_CASE("cli study-space writes eoc.csv with second order at p=2") {
  fs::path dir = fresh_dir("study_space");
  fs::path cfg = write_config(dir, R"({"case":"MS2","p":2,"m_list":[4,8,16]})");
  CoutCapture cap;
  int rc = cli({"study-space", "--config", cfg.string(), "--out", dir.string()});
  CHECK(rc == 0);
  CHECK(cap.text().find("[space]") != std::string::npos);
  std::string csv = read_text(dir / "eoc.csv");
  CHECK(csv.rfind("h,err_u,err_y,eoc_u,eoc_y\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
  json meta = read_meta(dir);
  CHECK(meta["summary"]["levels"].size() == 3);
  double order = meta["summary"]["fitted_order_u"].get<double>();
  CHECK(order > 1.7);
  CHECK(order < 2.3);
  CHECK(meta["config"]["N_per_m"] == 4);
}

TEST_CASE("cli study-time writes a delta ladder") {
  fs::path dir = fresh_dir("study_time");
  fs::path cfg = write_config(dir, R"({"case":"MS2","p":2,"m":16,"N_list":[2,4]})");
  int rc = cli({"study-time", "--config", cfg.string(), "--out", dir.string(), "--quiet"});
  CHECK(rc == 0);
  std::string csv = read_text(dir / "eoc.csv");
  CHECK(csv.rfind("delta,err_u,err_y,eoc_u,eoc_y\n", 0) == 0);
  json meta = read_meta(dir);
  CHECK(meta["config"]["N_list"] == json({2, 4}));
  CHECK(meta["summary"]["levels"][0]["delta"] == 0.5);
}

TEST_CASE("reruns produce byte-identical outputs") {
  fs::path d1 = fresh_dir("rerun_a");
  fs::path d2 = fresh_dir("rerun_b");
  std::string cfg_text = R"({"case":"MS2","p":4,"m":8,"N":8,
                             "solver":{"relaxation":0.5,"max_iter":300}})";
  fs::path c1 = write_config(d1, cfg_text);
  fs::path c2 = write_config(d2, cfg_text);
  CHECK(cli({"solve", "--config", c1.string(), "--out", d1.string(), "--quiet"}) == 0);
  CHECK(cli({"solve", "--config", c2.string(), "--out", d2.string(), "--quiet"}) == 0);
  CHECK(read_text(d1 / "solution.csv") == read_text(d2 / "solution.csv"));
  CHECK(read_text(d1 / "solution.csv").size() > 100);
}

TEST_CASE("PLAP_THREADS fans out studies without changing the numbers") {
  fs::path d1 = fresh_dir("threads_serial");
  fs::path d2 = fresh_dir("threads_pool");
  std::string cfg_text = R"({"case":"MS2","p":2,"m_list":[4,8,16]})";
  fs::path c1 = write_config(d1, cfg_text);
  fs::path c2 = write_config(d2, cfg_text);

  ::unsetenv("PLAP_THREADS");
  CHECK(cli({"study-space", "--config", c1.string(), "--out", d1.string(), "--quiet"}) == 0);
  CHECK(read_meta(d1)["summary"]["threads"] == 1);

  ::setenv("PLAP_THREADS", "2", 1);
  CHECK(cli({"study-space", "--config", c2.string(), "--out", d2.string(), "--quiet"}) == 0);
  CHECK(read_meta(d2)["summary"]["threads"] == 2);
  CHECK(read_text(d1 / "eoc.csv") == read_text(d2 / "eoc.csv"));

  ::setenv("PLAP_THREADS", "abc", 1);
  CHECK(cli({"study-space", "--config", c2.string(), "--out", d2.string(), "--quiet"}) == 2);
  ::setenv("PLAP_THREADS", "0", 1);
  CHECK(cli({"study-space", "--config", c2.string(), "--out", d2.string(), "--quiet"}) == 2);
  ::unsetenv("PLAP_THREADS");
}
