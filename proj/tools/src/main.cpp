#include <iostream>
#include <string>
#include <vector>

#include "freqsketch_cli/cli_commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return freqsketch::cli::run_cli(args, std::cin, std::cout, std::cerr);
}
