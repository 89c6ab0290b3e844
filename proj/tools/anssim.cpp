#include <iostream>
#include <string>
#include <vector>

#include "anssim/cli/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return anssim::cli::run(args, std::cout, std::cerr, anssim::cli::process_env());
}
