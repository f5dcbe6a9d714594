#include <iostream>

#include "seqident/cli.hpp"

int main(int argc, char** argv) {
  return seqident::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
