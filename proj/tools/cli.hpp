#pragma once

#include <iosfwd>

namespace ehtx::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;     // I/O and other unexpected errors
inline constexpr int kExitValidation = 2;  // bad arguments or scenario
inline constexpr int kExitSolver = 3;

/// Parses argv and runs one subcommand. CSV output goes to `out` unless
/// --out names a file; diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ehtx::cli
