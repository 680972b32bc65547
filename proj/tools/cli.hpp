#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace steinlil::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitAuditFailed = 2;

/// Runs one invocation; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace steinlil::cli
