#pragma once

// Entry point of the `cmmb` command-line tool, callable in-process.
//
// Exit codes: 0 success, 2 bad flags / domain or capacity error,
// 3 numeric or solver failure.

#include <iosfwd>
#include <string>
#include <vector>

namespace cmmb::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 2;
inline constexpr int kExitNumeric = 3;

// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cmmb::cli
