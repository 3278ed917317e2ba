#include <iostream>
#include <string>
#include <vector>

#include "cavitywalk/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cavitywalk::cli::main(args, std::cout, std::cerr);
}
