// SPDX-License-Identifier: Apache-2.0
//
// cli.hpp -- command-line front end.  Exit codes: 0 success, 1 physics
// failure (instability, non-convergence, escape), 2 usage or parse failure.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace iontrap {

// `args` excludes the program name.  Output and error streams are injected
// so the commands are testable in-process.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace iontrap
