#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hawkes_ld::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 2;
inline constexpr int exit_numerical = 3;

/// Runs one command line (args[0] is the program name) and returns the exit
/// code. CSV goes to `out` unless --output names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hawkes_ld::cli
