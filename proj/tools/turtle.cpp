#include <iostream>
#include <string>
#include <vector>

#include "turtle/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return turtle::cli::run(args, std::cout, std::cerr);
}
