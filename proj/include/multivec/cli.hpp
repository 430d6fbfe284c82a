// Copyright 2026 The multivec Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef MULTIVEC_CLI_HPP_
#define MULTIVEC_CLI_HPP_

#include <ostream>

namespace multivec {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 1,
  kExitNotConverged = 2,
  kExitCheckFailed = 3,
};

/// Runs the `multivec` command line. Output that is not written to a file
/// goes to `out`; diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace multivec

#endif  // MULTIVEC_CLI_HPP_
