#include <iostream>

#include <unistd.h>

#include "crnerg/cli.hpp"

int main(int argc, char** argv) {
    return crnerg::run_cli(argc, argv, std::cout, std::cerr, isatty(STDOUT_FILENO) != 0);
}
