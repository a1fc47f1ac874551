// Command-line front end. `run_cli` is what the gexp executable calls; it is
// exposed so tests can drive subcommands in-process.
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gexp {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

enum ExitCode { kExitPass = 0, kExitCheckFailed = 1, kExitUsage = 2 };

/// args excludes the program name. Reports go to `out` unless --out is given;
/// diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gexp
