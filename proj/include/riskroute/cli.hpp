#pragma once

#include <string>
#include <vector>

namespace riskroute {

/// Exit codes are a stable scripting contract.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitInfeasibleBudget = 3;
inline constexpr int kExitAssertionFailed = 4;

/// Entry point behind the `riskroute` binary; exposed so tests can drive the
/// commands in-process. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace riskroute
