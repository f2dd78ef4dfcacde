#include <iostream>

#include "famex/cli.hpp"

int main(int argc, char** argv) {
  return famex::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
