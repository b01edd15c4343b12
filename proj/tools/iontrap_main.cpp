// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <vector>

#include "iontrap/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return iontrap::run_cli(args, std::cout, std::cerr);
}
