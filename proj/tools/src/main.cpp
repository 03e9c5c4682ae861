#include <iostream>

#include "pwvcast/cli.hpp"

int main(int argc, char** argv) { return pwvcast::cli::run(argc, argv, std::cout, std::cerr); }
