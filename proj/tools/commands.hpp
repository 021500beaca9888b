#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace btcost::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitNumerical = 3;

/// Runs the command line `args` (args[0] is the program name). Returns the
/// process exit code: 0 success, 2 invalid input or flags, 3 numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace btcost::cli
