// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "cogisac/cli.hpp"

int main(int argc, char** argv) { return cogisac::run_cli(argc, argv, std::cout, std::cerr); }
