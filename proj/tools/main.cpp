// SPDX-License-Identifier: Apache-2.0
#include <exception>
#include <iostream>

#include "systemic/cli.hpp"

int main(int argc, char** argv) {
  try {
    return systemic::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "fatal: " << e.what() << '\n';
    return systemic::cli::numerical_failure;
  }
}
