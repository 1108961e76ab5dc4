#include <iostream>

#include "asep/cli.hpp"

int main(int argc, char** argv) {
    return asep::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
