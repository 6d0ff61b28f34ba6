#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aomdd {

enum ExitCode : int {
  kExitOk = 0,
  kExitNegative = 1,
  kExitUsage = 2,
  kExitResource = 3,
};

/// Runs the command line `args` (program name excluded).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aomdd
