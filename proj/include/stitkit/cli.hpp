#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stitkit::cli {

enum ExitCode : int {
  kAffirmative = 0,
  kNegative = 1,
  kUsage = 2,
  kInconclusive = 3,
};

// Runs one command. args excludes the program name. Reports go to out, diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stitkit::cli
