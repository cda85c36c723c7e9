#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qmult::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitVerdictFailure = 1;
inline constexpr int kExitUsage = 2;

// Runs the command line `args` (program name excluded). Reports go to `out`
// unless --out is given; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qmult::cli
