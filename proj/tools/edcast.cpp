#include <iostream>

#include "edcast/cli.hpp"

int main(int argc, char** argv) { return edcast::cli::run(argc, argv, std::cout, std::cerr); }
