#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace walt {

/// Exit statuses of run_cli.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitInvalidInput = 2,
  kExitBuildFailed = 3,
  kExitExecutionFailed = 4,
  kExitNotFound = 5,
};

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
/// `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace walt
