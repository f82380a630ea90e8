#pragma once

#include <iosfwd>

namespace scansim::cli {

// Exit codes: 0 success, 2 input or config error, 3 runtime error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitRuntime = 3;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace scansim::cli
