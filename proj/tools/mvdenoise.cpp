// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The mvdenoise Authors

#include <iostream>

#include "mvdenoise/cli.hpp"

int main(int argc, char** argv) { return mvdenoise::cli::run_cli(argc, argv, std::cout, std::cerr); }
