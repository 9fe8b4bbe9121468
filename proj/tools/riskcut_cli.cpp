#include <iostream>

#include "riskcut/cli.hpp"

int main(int argc, char** argv) {
  return riskcut::cli::main_entry(argc, argv, std::cout, std::cerr);
}
