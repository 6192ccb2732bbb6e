// Copyright (c) 2026 omq contributors
// SPDX-License-Identifier: MIT
#include "omq/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return omq::cli::run(argc, argv, std::cout, std::cerr); }
