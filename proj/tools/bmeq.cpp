#include <iostream>

#include "bmeq/cli.hpp"

int main(int argc, char** argv) { return bmeq::run_cli(argc, argv, std::cout, std::cerr); }
