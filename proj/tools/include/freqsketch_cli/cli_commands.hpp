#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace freqsketch::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kParseError = 2,
  kIncompatible = 3,
  kUnsupported = 4,
};

/// Runs the tool on `args` (without the program name). `in` backs `-` / missing input
/// paths; results go to `out` and diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace freqsketch::cli
