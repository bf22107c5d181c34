#include <iostream>

#include "nsac/cli.hpp"

int main(int argc, char** argv) { return nsac::run_cli(argc, argv, std::cout, std::cerr); }
