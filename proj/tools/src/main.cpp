#include <iostream>

#include "buzzcal/cli/commands.hpp"

int main(int argc, char** argv) { return buzzcal::cli::run(argc, argv, std::cout, std::cerr); }
