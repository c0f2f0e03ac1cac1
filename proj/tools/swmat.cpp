#include <iostream>

#include "swmat/cli.hpp"

int main(int argc, char** argv) { return swmat::run(argc, argv, std::cout, std::cerr); }
