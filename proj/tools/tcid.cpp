#include "tcid/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return tcid::cli::run(argc, argv, std::cout, std::cerr);
}
