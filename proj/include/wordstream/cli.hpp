#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace wordstream {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitResource = 3;

// Subcommands: check, estimate, growth, ball, hard, bench.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace wordstream
