#include "prodtest/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return prodtest::cli::run(argc, argv, std::cout, std::cerr); }
