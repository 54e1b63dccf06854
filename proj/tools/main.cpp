#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return cosym::cli_main(argc, argv, std::cout, std::cerr);
}
