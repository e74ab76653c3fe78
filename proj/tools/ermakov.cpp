#include <iostream>

#include "ermakov/cli/commands.hpp"

int main(int argc, char** argv) { return ermakov::cli::run(argc, argv, std::cout, std::cerr); }
