#include <iostream>

#include "swlqr/cli.hpp"

int main(int argc, char** argv) { return swlqr::run_cli(argc, argv, std::cout, std::cerr); }
