#include <iostream>
#include <string>
#include <vector>

#include "vspace/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return vs::cli::run(args, std::cout, std::cerr);
}
