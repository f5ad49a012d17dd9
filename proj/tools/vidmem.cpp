#include <iostream>
#include <string>
#include <vector>

#include "vidmem/cli/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return vidmem::cli::main_entry(args, std::cout, std::cerr);
}
