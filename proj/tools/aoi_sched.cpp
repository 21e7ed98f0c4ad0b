#include <iostream>

#include "aoi/cli.hpp"

int main(int argc, char** argv) { return aoi::run_cli(argc, argv, std::cout, std::cerr); }
