#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pulsesynth::cli {

enum ExitCode : int { kSuccess = 0, kNotConverged = 1, kUsage = 2 };

/// Runs the command line `args` (args[0] is the program name). Results go to
/// `out`, diagnostics and usage text to `err`.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

/// `--config path` (or `--config=path`) removed from `args` and replaced by
/// `--key=value` tokens placed right after the subcommand, so flags given on
/// the command line win.
std::vector<std::string> expand_config(std::vector<std::string> args);

}  // namespace pulsesynth::cli
