#include <iostream>

#include "xlv/cli.hpp"

int main(int argc, char** argv) {
  return xlv::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
