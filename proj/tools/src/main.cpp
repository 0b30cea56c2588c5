#include <iostream>

#include "groundwave_cli/commands.hpp"

int main(int argc, char** argv) {
  return groundwave::cli::run_cli(argc, argv, std::cout, std::cerr);
}
