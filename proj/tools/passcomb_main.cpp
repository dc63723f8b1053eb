#include <iostream>
#include <string>
#include <vector>

#include "passcomb/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return passcomb::cli::run_cli(args, std::cout, std::cerr);
}
