#include "difflab/cli/run.hpp"

#include <iostream>

int main(int argc, char** argv) { return difflab::cli::run_cli(argc, argv, std::cout, std::cerr); }
