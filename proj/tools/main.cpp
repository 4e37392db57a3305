#include "hsym/cli/app.hpp"

#include <iostream>

int main(int argc, char** argv) { return hsym::cli::run_app(argc, argv, std::cout, std::cerr); }
