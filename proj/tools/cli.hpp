#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace algwb::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kParseError = 2, kBudgetExceeded = 3, kHypothesisError = 4 };

/// Runs one command line (without the program name). Reports go to out,
/// diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(const std::string& bytes);

}  // namespace algwb::cli
