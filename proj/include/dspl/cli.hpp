#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dspl {

/// Exit codes: 0 success or valid, 2 domain negative (invalid
/// configuration, no match, unsatisfiable), 1 input or system error.
enum ExitStatus : int { kExitOk = 0, kExitError = 1, kExitNegative = 2 };

/// Runs one subcommand. `args` excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dspl
