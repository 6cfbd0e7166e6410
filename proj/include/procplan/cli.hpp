#pragma once

// The procplan command-line front end.
//
//   procplan check PATH
//   procplan fmt PATH [--write | --check]
//   procplan view PATH KIND [--layer L] [--scope S] [--milestone M] [--format text|json]
//   procplan serve [--addr HOST:PORT] [--data-dir DIR] [--user NAME:PASSWORD]...

#include <ostream>

namespace procplan::cli {

inline constexpr int kExitClean = 0;
inline constexpr int kExitWarnings = 1;  // also: fmt --check found a difference
inline constexpr int kExitErrors = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitBadSubject = 4;
inline constexpr int kExitUsage = 64;

// Runs one invocation. `serve` blocks until SIGINT or SIGTERM.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace procplan::cli
