#include <iostream>

#include "riskmine/cli/commands.hpp"

int main(int argc, char** argv) {
  return riskmine::cli::run_cli(argc, argv, std::cout, std::cerr);
}
