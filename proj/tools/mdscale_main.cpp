#include <iostream>
#include <string>
#include <vector>

#include "mdscale/io.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mdscale::run_cli(args, std::cout, std::cerr);
}
