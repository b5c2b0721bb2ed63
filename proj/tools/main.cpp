#include <iostream>

#include "adaptkit/cli.hpp"

int main(int argc, char** argv) {
    return adaptkit::run_cli(argc, argv, std::cout, std::cerr);
}
