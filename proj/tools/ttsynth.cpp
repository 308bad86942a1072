#include <iostream>

#include "ttsynth/cli.hpp"

int main(int argc, char** argv) { return ttsynth::cli::run(argc, argv, std::cout, std::cerr); }
