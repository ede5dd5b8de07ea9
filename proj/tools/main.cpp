#include <iostream>

#include "loccap/cli.hpp"

int main(int argc, char** argv) { return loccap::cli::run(argc, argv, std::cout, std::cerr); }
