#pragma once

#include <string>
#include <vector>

// Command line front end (subcommands: validate, meanfield, spectrum,
// isolate, route, sweep, oracle-check). Kept as a library function so tests
// can drive it in-process. Returns the process exit code: 0 success,
// 1 usage/parse/validation problems, 2 numerical failures.

namespace omniport::cli {

int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);  // without the program name

}  // namespace omniport::cli
