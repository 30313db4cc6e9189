#include <iostream>

#include "cradle/cli.hpp"

int main(int argc, char** argv) {
    return cradle::run_cli(argc, argv, std::cout, std::cerr);
}
