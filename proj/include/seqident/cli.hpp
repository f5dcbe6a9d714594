#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace seqident::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitUsage = 2,
  kExitInternal = 3,
};

// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace seqident::cli
