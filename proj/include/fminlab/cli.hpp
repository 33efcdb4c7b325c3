#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fminlab {

// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitUsage = 2, kExitNumeric = 3 };

// Runs the tool on args (args[0] is the program name); reports go to their
// --out files or to out, diagnostics to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace fminlab
