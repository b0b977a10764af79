#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qhinf::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int { kSuccess = 0, kFailed = 1, kInputError = 2 };

/// Runs one command line (args excludes the program name). Results go to `out`, diagnostics to
/// `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace qhinf::cli
