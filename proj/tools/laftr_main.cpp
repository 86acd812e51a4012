#include "laftr/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return laftr::cli::run_cli(argc, argv, std::cout, std::cerr); }
