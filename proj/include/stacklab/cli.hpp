#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "stacklab/stacker.hpp"

namespace stacklab::cli {

struct Config {
  stacker::StackerConfig stacker;
  int juncture_cap = 16;
  long long search_budget = 10'000'000;
};

// Loads defaults, then the optional JSON config file, then STACKLAB_SEED.
Config load_config(const std::string& config_path);

// Runs one invocation; JSON results on `out`, diagnostics on `err`.
// Exit codes: 0 success, 1 verification failure, 2 input error,
// 3 precondition/budget violation.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stacklab::cli
