#include <iostream>

#include "threepc/commands.hpp"

int main(int argc, char** argv)
{
    return threepc::client_main({argv + 1, argv + argc}, std::cout, std::cerr);
}
