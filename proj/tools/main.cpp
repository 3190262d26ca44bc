#include <iostream>

#include "dspl/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dspl::dispatch(args, std::cout, std::cerr);
}
