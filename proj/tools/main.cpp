#include <iostream>

#include "procplan/cli.hpp"

int main(int argc, char** argv) { return procplan::cli::run(argc, argv, std::cout, std::cerr); }
