#include <iostream>

#include "fracss/cli.hpp"

int main(int argc, char** argv) { return fracss::run_cli(argc, argv, std::cout, std::cerr); }
