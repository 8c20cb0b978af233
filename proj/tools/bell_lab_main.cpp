// SPDX-License-Identifier: Apache-2.0

#include <string>
#include <vector>

#include "bell_lab/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return bell_lab::cli::run_main(args);
}
