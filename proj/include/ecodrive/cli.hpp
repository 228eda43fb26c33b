#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ecodrive::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 2,
  kInfeasible = 3,
  kInternal = 4,
};

// Runs the command line (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ecodrive::cli
