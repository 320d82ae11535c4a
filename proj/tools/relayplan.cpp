#include <iostream>

#include "relayplan/cli.hpp"

int main(int argc, char** argv) { return relayplan::run_cli(argc, argv, std::cout, std::cerr); }
