#include <iostream>
#include <string>
#include <vector>

#include "gsi/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return gsi::run_cli(args, std::cout, std::cerr);
}
