#pragma once

#include <iosfwd>

namespace mapso::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitOther = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;

/// Entry point behind the `mapso` executable. Data goes to `out` (or the
/// --output path), the effective-config block and diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mapso::cli
