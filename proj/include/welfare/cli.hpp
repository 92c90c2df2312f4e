#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace welfare::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitNumerical = 1;
inline constexpr int kExitUsage = 2;

/// Runs one invocation. `args` excludes the program name. Results go to `out`,
/// diagnostics to `err`. Returns 0 on success, 2 for usage, domain and
/// precondition errors, 1 for numerical failures (including a failed `verify`).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace welfare::cli
