#include <iostream>

#include "ratio_rmt/cli.hpp"

#ifndef RATIO_RMT_DEFAULT_FIXTURES
#define RATIO_RMT_DEFAULT_FIXTURES ""
#endif

int main(int argc, char** argv) {
  ratio_rmt::cli::Environment env{RATIO_RMT_DEFAULT_FIXTURES};
  return ratio_rmt::cli::run_cli(argc, argv, std::cout, std::cerr, env);
}
