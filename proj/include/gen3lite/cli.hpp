#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace gen3lite {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_validation_failed = 2 };

/// Runs the command line `args` (without the program name). Output goes to
/// `out`, diagnostics and warnings to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gen3lite
