#include <iostream>

#include "gmrf/cli.hpp"

int main(int argc, char** argv) { return gmrf::run_cli(argc, argv, std::cout, std::cerr); }
