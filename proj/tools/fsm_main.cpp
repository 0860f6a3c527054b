#include <iostream>

#include "fsm/cli.hpp"

int main(int argc, char** argv) { return fsm::dispatch(argc, argv, std::cout, std::cerr); }
