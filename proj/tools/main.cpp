#include <iostream>

#include "dspsa/cli.hpp"

int main(int argc, char** argv) { return dspsa::cli::parse_and_dispatch(argc, argv, std::cout, std::cerr); }
