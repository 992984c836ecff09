#include <iostream>

#include "dfdr/cli.hpp"

int main(int argc, char** argv) { return dfdr::cli::run(argc, argv, std::cout, std::cerr); }
