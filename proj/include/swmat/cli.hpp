#pragma once

#include <iosfwd>

namespace swmat {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitInvariant = 3;

/// Entry point of the `swmat` tool. Reports go to files or `out`, diagnostics
/// to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace swmat
