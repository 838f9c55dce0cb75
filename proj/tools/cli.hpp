#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace atc::cli {

/// Exit codes: 0 success or verified, 1 verification mismatch, 2 input error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitMismatch = 1;
inline constexpr int kExitInputError = 2;

/// Runs the command line (args excludes the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace atc::cli
