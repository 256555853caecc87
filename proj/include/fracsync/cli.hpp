#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fracsync {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitRuntime = 2, kExitNoAcceptance = 3 };

/// Parses the command line, runs one subcommand and persists its outputs.
/// `args` excludes the program name. Summary goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace fracsync
