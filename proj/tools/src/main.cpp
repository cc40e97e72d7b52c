#include "wickfield_cli/commands.hpp"

#include <iostream>

int main(int argc, char** argv) { return wickfield::cli::run(argc, argv, std::cout, std::cerr); }
