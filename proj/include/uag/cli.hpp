#pragma once

#include <iosfwd>

namespace uag::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

// Runs the `uag` command line. Prompts and reports go to `out`, diagnostics
// to `err`; interactive input is read from `in`.
int run(int argc, const char* const* argv, std::istream& in, std::ostream& out, std::ostream& err);

} // namespace uag::cli
