#pragma once

#include <iosfwd>

namespace kplane::cli {

inline constexpr int kExitUsage = 64;

// Subcommands: verify, transform, norm, sample. Returns the process exit code:
// 0 pass, 1 fail, 2 inconclusive, 64 usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace kplane::cli
