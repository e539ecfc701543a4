#pragma once

// Command-line front end. Exit codes: 0 success or pass, 1 check failure,
// 2 usage or configuration error, 3 solver failure.

#include <iosfwd>
#include <string>
#include <vector>

namespace divopt::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitSolver = 3;

/// Runs one invocation; `args` excludes the program name. Results go to
/// `out`, the line-oriented log and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace divopt::cli
