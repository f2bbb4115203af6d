#pragma once

#include <iosfwd>

namespace dspsa::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitRuntimeError = 2;

/// Parses the command line and runs the subcommand. stdout gets a one-line JSON
/// summary, stderr gets human-readable detail.
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace dspsa::cli
