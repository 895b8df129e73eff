#include <iostream>

#include "irl/cli.hpp"

int main(int argc, char** argv) { return irl::cli::main_entry(argc, argv, std::cout, std::cerr); }
