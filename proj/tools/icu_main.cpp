// Copyright (C) 2026 The ICU Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "icu/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return icu::run_cli(args, std::cout, std::cerr);
}
