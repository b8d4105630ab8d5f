#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rifs {

/// Stable process exit codes.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitConfig = 2,
    kExitInsufficientData = 3,
    kExitInconclusive = 4,
};

/// Runs the command line `args` (without the program name). Subcommands:
/// simulate, spectrum, benchmark, tangent, figure1, defaults.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace rifs
