#include "semidot/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return semidot::cli::run(argc, argv, std::cout, std::cerr);
}
