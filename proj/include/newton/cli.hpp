#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace newton {

// Exit codes of the command-line front end.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitMaxIterations = 2,
    kExitSolverError = 3,
};

// Runs `newton-forge <args...>` in-process; args exclude the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace newton
