#pragma once

#include <iosfwd>

namespace bdbridge::cli {

// Exit codes: 0 success, 1 usage error, 2 domain or data error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitDomain = 2;

// Runs one `bdbridge` invocation. Output goes to `out` unless --output names
// a file; diagnostics go to `err`.
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bdbridge::cli
