#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace nlcs::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitDomain = 2;
inline constexpr int kExitConvergence = 3;

/// Runs one invocation; args excludes the program name. Data written to "-" goes to out.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nlcs::cli
