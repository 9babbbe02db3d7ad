#include <iostream>

#include "dircrawl/cli.hpp"

int main(int argc, char** argv) { return dircrawl::cli::run(argc, argv, std::cout, std::cerr); }
