#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vs::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kParseError = 2,
  kSolverError = 3,
  kSizeGuard = 4,
};

/// Runs the command line `args` (without the program name). Regular output
/// goes to `out` (or to the --out file), diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vs::cli
