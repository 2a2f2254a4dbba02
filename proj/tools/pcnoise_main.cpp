#include <iostream>

#include "pcnoise/cli.hpp"

int main(int argc, char** argv) {
  return pcnoise::run_cli(argc, argv, std::cout, std::cerr);
}
