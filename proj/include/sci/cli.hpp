#pragma once

// Command-line front end. Exit codes: 0 success, 1 validation errors found,
// 2 usage or I/O error.

#include <iosfwd>
#include <string>
#include <vector>

namespace sci::cli {

inline constexpr int kOk = 0;
inline constexpr int kInvalid = 1;
inline constexpr int kUsage = 2;

/// Runs one invocation; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sci::cli
