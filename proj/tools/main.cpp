#include <iostream>

#include "floodsp/cli.hpp"

int main(int argc, char** argv) { return floodsp::cli::run(argc, argv, std::cout, std::cerr); }
