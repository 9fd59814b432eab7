#include <iostream>

#include "rif/cli.hpp"

int main(int argc, char** argv) { return rif::run_cli(argc, argv, std::cout, std::cerr); }
