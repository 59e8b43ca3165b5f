#pragma once

#include <iosfwd>

namespace cvbell::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

/// Parses argv, runs the selected subcommand and writes its report. Output
/// goes to --out, else to $CVBELL_OUTPUT_DIR/<command>.<format>, else `out`.
/// Diagnostics go to `err`. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cvbell::cli
