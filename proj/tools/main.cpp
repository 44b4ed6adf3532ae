#include <iostream>

#include "elan_cli.hpp"

int main(int argc, char** argv) { return elan::cli::run(argc, argv, std::cout, std::cerr); }
