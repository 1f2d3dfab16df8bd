#include <iostream>

#include "cmrel/cli/commands.hpp"

int main(int argc, char** argv) { return cmrel::cli::run(argc, argv, std::cout, std::cerr); }
