#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sparsemine::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kData = 3,
  kNumerical = 4,
};

/// Runs one command line (without the program name). Regular output goes
/// to `out`, diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sparsemine::cli
