#pragma once

#include <iosfwd>

namespace cbrl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRunFailure = 2;

/// Entry point of the `cbrl` tool. Output and diagnostics go to `out` and `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cbrl::cli
