#include <iostream>

#include "ptc/cli/commands.hpp"

int main(int argc, char** argv) { return ptc::cli::cli_main(argc, argv, std::cout, std::cerr); }
