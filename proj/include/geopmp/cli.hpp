#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace geopmp {

/// Exit codes of the command-line front end.
inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

/// Subcommands verify, solve, freq-matrices and dft. `args` excludes the
/// program name. JSON reports go to `out`, the human summary to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(const std::vector<std::string>& args);

}  // namespace geopmp
