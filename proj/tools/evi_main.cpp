#include <iostream>

#include "evi/cli.hpp"

int main(int argc, char** argv) { return evi::cli::main(argc, argv, std::cout, std::cerr); }
