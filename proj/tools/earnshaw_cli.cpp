#include <iostream>

#include "earnshaw/cli.hpp"

int main(int argc, char** argv) { return earnshaw::cli::run(argc, argv, std::cout, std::cerr); }
