#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace tfab {

enum ExitCode : int {
  kExitTrue = 0,
  kExitFalse = 1,
  kExitUsage = 2,
  kExitParse = 3,
  kExitInconclusive = 4,
};

inline constexpr const char* kJsonSchema = "tfab/1";

/// Runs one command line (without the program name). Reports go to `out`, diagnostics to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tfab
