#include "traceent/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return traceent::cli::run(argc, argv, std::cout, std::cerr); }
