#include <iostream>

#include "shorsim/cli.hpp"

int main(int argc, char** argv) { return shorsim::run_cli(argc, argv, std::cout, std::cerr); }
