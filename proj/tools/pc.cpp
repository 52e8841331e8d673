#include "pc/cli/app.hpp"

#include <iostream>

int main(int argc, char** argv) { return pc::cli::run(argc, argv, std::cout, std::cerr); }
