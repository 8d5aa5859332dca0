// Copyright 2026 The ddgan Authors
// SPDX-License-Identifier: Apache-2.0

#include "ddgan/cli.hpp"

#include <iostream>

int main(int argc, char **argv)
{
  return ddgan::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
