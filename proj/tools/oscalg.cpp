#include "oscalg/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return oscalg::cli::main(argc, argv, std::cout, std::cerr); }
