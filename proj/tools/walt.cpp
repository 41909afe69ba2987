#include <iostream>

#include "walt/cli.hpp"

int main(int argc, char** argv) { return walt::run_cli(argc, argv, std::cout, std::cerr); }
