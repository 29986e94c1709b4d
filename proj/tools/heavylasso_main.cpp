#include <iostream>

#include "heavylasso/cli.hpp"

int main(int argc, char** argv) { return heavylasso::run_cli(argc, argv, std::cout, std::cerr); }
