// Copyright (c) 2026 omq contributors
// SPDX-License-Identifier: MIT
//
// Command-line frontend: rewrite, answer, mark, oracle, check.
#pragma once

#include <ostream>

namespace omq::cli {

enum Exit { Ok = 0, Diagnostic = 1, Refused = 2 };

// argv[0] is the program name. Output goes to `out` unless -o is given.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace omq::cli
