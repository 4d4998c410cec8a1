#include <iostream>
#include <string>
#include <vector>

#include "oidcsim/cli.hpp"

int main(int argc, char** argv) {
  return oidcsim::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
