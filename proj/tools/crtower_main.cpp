#include <iostream>

#include "crtower/cli.hpp"

int main(int argc, char** argv) { return crtower::run(argc, argv, std::cout, std::cerr); }
