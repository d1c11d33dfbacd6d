#include <iostream>

#include "kplane/cli.hpp"

int main(int argc, char** argv) { return kplane::cli::run(argc, argv, std::cout, std::cerr); }
