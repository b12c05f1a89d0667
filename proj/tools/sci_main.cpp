#include <iostream>

#include "sci/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return sci::cli::run(args, std::cout, std::cerr);
}
