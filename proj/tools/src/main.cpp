#include <iostream>

#include "sparsemine_tools/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return sparsemine::cli::run(args, std::cout, std::cerr);
}
