#pragma once

#include <string>
#include <vector>

namespace iltlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

// Parses argv and runs one subcommand; returns the process exit code.
int run(const std::vector<std::string>& args);

}  // namespace iltlab::cli
