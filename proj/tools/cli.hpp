#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace blindseq::cli {

// Exit codes: 0 success (an elimination is a success), 1 runtime failure,
// 2 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace blindseq::cli
