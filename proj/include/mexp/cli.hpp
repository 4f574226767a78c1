#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mexp {

/// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRowErrors = 1;  // some manifest rows failed, the rest were processed
inline constexpr int kExitFailure = 2;    // bad flags, unreadable input, protocol errors

/// Runs `mexp <command> [flags]`. args[0] is the program name. Normal output
/// goes to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run_cli(int argc, const char* const* argv);

}  // namespace mexp
