#include <iostream>

#include "cbrl/cli.hpp"

int main(int argc, char** argv) {
    return cbrl::cli::run_cli(argc, argv, std::cout, std::cerr);
}
