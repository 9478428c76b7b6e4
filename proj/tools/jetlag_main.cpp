#include <iostream>
#include <vector>

#include "jetlag/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return jetlag::run_cli(args, std::cout, std::cerr);
}
