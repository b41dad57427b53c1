#include <iostream>

#include "icestring/cli.hpp"

int main(int argc, char** argv) { return icestr::run_cli(argc, argv, std::cout, std::cerr); }
