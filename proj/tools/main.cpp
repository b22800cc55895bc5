#include <iostream>
#include <string>
#include <vector>

#include "affective/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return affective::cli::run_command(args, std::cout, std::cerr);
}
