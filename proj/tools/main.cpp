#include <iostream>

#include "ddg/cli.hpp"

int main(int argc, char** argv) { return ddg::run_cli(argc, argv, std::cout, std::cerr); }
