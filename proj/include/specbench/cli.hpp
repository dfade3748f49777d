#pragma once

#include <iosfwd>

namespace specbench::cli {

enum ExitCode : int {
  kOk = 0,
  kBadConfig = 1,
  kNoInputs = 2,
  kAllFailed = 3,
  kRuntimeFailure = 4,
};

/// Entry point behind the specbench executable. Data goes to `out`,
/// diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace specbench::cli
