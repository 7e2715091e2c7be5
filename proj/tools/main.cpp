#include <iostream>
#include <string>
#include <vector>

#include "iakr/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return iakr::run(args, std::cout, std::cerr);
}
