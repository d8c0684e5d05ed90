#include <iostream>

#include "lvfront/cli.hpp"

int main(int argc, char** argv) { return lvfront::run_command(argc, argv, std::cout, std::cerr); }
