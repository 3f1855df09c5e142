#include <iostream>

#include "stitkit/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return stitkit::cli::run(args, std::cout, std::cerr);
}
