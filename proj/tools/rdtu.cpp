#include <iostream>
#include <string>
#include <vector>

#include "rdtu/cli.hpp"

int main(int argc, char** argv) {
  return rdtu::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
