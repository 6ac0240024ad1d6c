#include "itcr/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return itcr::run_cli(argc, argv, std::cout, std::cerr);
}
