#include <iostream>

#include "sbpm/cli.hpp"

int main(int argc, char** argv) {
  return sbpm::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
