#include "xxmis/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return xxmis::run(argc, argv, std::cout, std::cerr); }
