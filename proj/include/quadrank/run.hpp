#pragma once

#include "quadrank/config.hpp"

#include <ostream>

namespace quadrank {

enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitCapacity = 3, kExitIncomplete = 4 };

/// Executes a parsed configuration; results go to `out` (or the configured
/// output file), diagnostics and the normalized config to `log`.
int run(const config::RunConfig& cfg, std::ostream& out, std::ostream& log);

/// Parses argv, runs, and maps exceptions to exit codes.
int main_entry(int argc, const char* const* argv);

}  // namespace quadrank
