#pragma once

#include <iosfwd>

namespace ust::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kFailure = 1;
inline constexpr int kUsageError = 2;  // bad flags, config, input data or IO
inline constexpr int kInfeasible = 3;

// Entry point behind the `ustat` binary; takes argv and the two output streams
// so tests can drive it in-process.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ust::cli
