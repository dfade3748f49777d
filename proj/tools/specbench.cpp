#include <iostream>

#include "specbench/cli.hpp"

int main(int argc, char** argv) { return specbench::cli::run(argc, argv, std::cout, std::cerr); }
