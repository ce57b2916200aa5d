#include <iostream>

#include "tmkit/cli/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return tmkit::run_cli(args, std::cout, std::cerr);
}
