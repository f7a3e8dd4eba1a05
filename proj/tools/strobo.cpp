#include <iostream>

#include "strobo/cli.hpp"

int main(int argc, char** argv) { return strobo::cli::run(argc, argv, std::cout, std::cerr); }
