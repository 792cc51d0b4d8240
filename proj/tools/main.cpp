#include <iostream>

#include "zseries/cli.hpp"

int main(int argc, char** argv)
{
    return zseries::cli::run(argc, argv, std::cout, std::cerr);
}
