#include <iostream>

#include "rml/cli.hpp"

int main(int argc, char** argv) { return rml::cli::run(argc, argv, std::cout, std::cerr); }
