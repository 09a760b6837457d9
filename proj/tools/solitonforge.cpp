#include <iostream>

#include "solitonforge/cli/commands.hpp"

int main(int argc, char** argv) { return solitonforge::cli::run_cli(argc, argv, std::cout, std::cerr); }
