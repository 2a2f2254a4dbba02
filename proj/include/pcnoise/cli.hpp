#pragma once

#include <iosfwd>

namespace pcnoise {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Entry point for the pcnoise command line. Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace pcnoise
