#include <iostream>

#include "gridcast/cli/cli.hpp"

int main(int argc, char** argv) { return gridcast::cli::run_cli(argc, argv, std::cout, std::cerr); }
