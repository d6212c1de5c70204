#pragma once

#include <iosfwd>

namespace surropt::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitEnvironment = 3,
  kExitInternal = 4,
};

/// Parses argv and runs one subcommand. Never throws; errors become exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace surropt::cli
