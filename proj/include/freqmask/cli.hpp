#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace freqmask {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

/// Subcommands: mask, spectrum, corpus, train, eval, experiment {types|ratios|bands}.
/// `args` excludes the program name. Returns 0 on success, 1 on usage errors
/// and 2 on runtime failures; diagnostics go to `err` as a single line.
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

int run_cli(int argc, char** argv);

}  // namespace freqmask
