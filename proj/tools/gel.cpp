#include <iostream>
#include <string>
#include <vector>

#include "gel/cli/commands.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return gel::cli::run(args, std::cout, std::cerr);
}
