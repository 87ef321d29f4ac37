#pragma once

#include <ostream>

namespace prodtest::cli {

// Exit codes of the command-line tool.
enum Exit : int {
  kOk = 0,
  kVerifyFailed = 1,
  kInputError = 2,
  kBudget = 3,
  kIoError = 4,
};

// Runs `prodtest` with the given arguments (argv[0] is the program name).
// Reports go to `out`, diagnostics and warnings to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace prodtest::cli
