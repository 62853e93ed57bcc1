#include "gausslm/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return gausslm::run(argc, argv, std::cout, std::cerr); }
