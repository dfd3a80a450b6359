#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace glmminimax::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitViolation = 2;

/// Runs one invocation. `args` excludes the program name. Results go to `out`
/// (or the --output file), the one-line diagnostic to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace glmminimax::cli
