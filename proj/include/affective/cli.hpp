#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace affective::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNegative = 1;
inline constexpr int kExitSolverFailure = 2;
inline constexpr int kExitUsage = 64;

/// Runs one subcommand. `args` excludes the program name. Results go to
/// `out` (or the --out file), diagnostics to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace affective::cli
