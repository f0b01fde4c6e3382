#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) { return csa::cli::run(argc, argv, std::cout, std::cerr); }
