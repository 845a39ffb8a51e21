#include <iostream>

#include "cnldoc/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cnldoc::run_cli(args, std::cout, std::cerr);
}
