#include <iostream>
#include <string>
#include <vector>

#include "nanophase/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return nanophase::cli::run_pipeline(args, std::cout, std::cerr);
}
