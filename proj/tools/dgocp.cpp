#include "dgocp/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return dgocp::cli::run(argc, argv, std::cout, std::cerr);
}
