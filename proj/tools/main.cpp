#include <iostream>

#include "nigmg_cli/commands.hpp"

int main(int argc, char** argv) { return nigmg::cli::run(argc, argv, std::cout, std::cerr); }
