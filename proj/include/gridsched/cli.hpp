#pragma once

// Command-line front end, callable in-process so tests can drive it.
// Exit codes: 0 success, 2 validation/config error, 3 infeasible model,
// 4 solver failure.

#include <string>
#include <vector>

namespace gridsched {

int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, char** argv);

}  // namespace gridsched
