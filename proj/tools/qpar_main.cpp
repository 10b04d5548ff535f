#include <iostream>
#include <vector>

#include "qpar/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return qpar::run_cli(args, std::cout, std::cerr);
}
