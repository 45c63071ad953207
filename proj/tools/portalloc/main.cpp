#include <iostream>

#include "portalloc/cli.hpp"

int main(int argc, char** argv) { return portalloc::cli::run(argc, argv, std::cout, std::cerr); }
