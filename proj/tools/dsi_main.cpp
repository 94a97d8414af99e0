#include <iostream>

#include "dsi/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dsi::cli::run(args, std::cout, std::cerr);
}
