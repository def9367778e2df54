// Copyright 2026 the fcvi authors
// SPDX-License-Identifier: Apache-2.0
#include <string>
#include <vector>

#include "fcvi/harness.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args;
  args.reserve(static_cast<std::size_t>(argc));
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return fcvi::run_cli(args);
}
