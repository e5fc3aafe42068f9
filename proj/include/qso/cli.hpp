#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qso::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kOk = 0, kError = 1, kNotConverged = 2 };

/// Runs the command line `args` (args[0] is the program name). Results go to
/// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace qso::cli
