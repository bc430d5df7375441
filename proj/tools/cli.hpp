#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace backflow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1; // solver or fit failure
inline constexpr int kExitUsage = 2;   // bad flags or config

/// Runs one command line (args[0] is the program name). Human-readable
/// summaries go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace backflow::cli
