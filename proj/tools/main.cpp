#include <iostream>

#include "supalign/cli.hpp"

int main(int argc, char** argv) { return supalign::cli::run(argc, argv, std::cout, std::cerr); }
