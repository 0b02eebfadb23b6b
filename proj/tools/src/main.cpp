#include <iostream>

#include "spdlm_cli/commands.hpp"

int main(int argc, char** argv) {
    return spdlm::cli::run(argc, argv, std::cout, std::cerr);
}
