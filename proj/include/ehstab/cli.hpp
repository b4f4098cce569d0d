#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ehstab::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kOk = 0, kUsage = 1, kVerificationFailed = 2 };

/// Runs one command line (without the program name). Data goes to `out`
/// unless an --out path is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ehstab::cli
