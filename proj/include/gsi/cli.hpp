#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gsi {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitNumerical = 3,
};

/// Entry point of the `gsi` tool. `args` excludes the program name.
/// Subcommands: generate, impute, benchmark, tune, compare.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gsi
