#pragma once

#include <iosfwd>

namespace heavylasso {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitInput = 2,     // bad flags, config or input files
  kExitScenario = 3,  // a simulation method exceeded its failure budget
  kExitInvariant = 4  // a hard invariant failed in `verify`
};

/// Entry point of the `heavylasso` tool (subcommands fit, path, simulate,
/// verify). Progress and diagnostics go to `err`, short reports to `out`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace heavylasso
