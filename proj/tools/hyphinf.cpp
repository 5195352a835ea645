#include <iostream>

#include "hyphinf/cli.hpp"

int main(int argc, char** argv) {
  return hyphinf::cli::run(argc, argv, std::cout, std::cerr);
}
