// Command line front end.  Subcommands: solve, study-space, study-time,
// validate; each takes --config <json> and writes its outputs (solution.csv
// or eoc.csv, plus meta.json) into --out.
//
// Exit codes: 0 success, 1 internal error, 2 bad configuration,
// 3 nonlinear solver failure, 4 inadmissible step size.
#pragma once

#include <string>
#include <vector>

namespace plapmem {

int run_cli(const std::vector<std::string>& args);

}  // namespace plapmem
