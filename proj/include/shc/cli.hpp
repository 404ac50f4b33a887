#pragma once

#include <string>
#include <vector>

namespace shc::cli {

// exit codes: 0 success, 1 verification failure, 2 usage/config error,
// 3 numerical failure
inline constexpr int exit_ok = 0;
inline constexpr int exit_verify_failed = 1;
inline constexpr int exit_usage = 2;
inline constexpr int exit_numerical = 3;

int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

// canonical config text (CLI11 config format) for a parsed command line;
// used to check that configs round-trip losslessly
std::string canonical_config(const std::vector<std::string>& args);

} // namespace shc::cli
