#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace etlab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitSolver = 2;
inline constexpr int kExitConfig = 3;

/// `args` = {subcommand, config path, key=value overrides...}.
/// Returns the process exit code; failures also leave error.json in the
/// output directory when one is known.
int run_app(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace etlab
