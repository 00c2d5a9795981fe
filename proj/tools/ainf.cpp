#include "ainf/cli.hpp"

#include <cstdio>

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string output;
    int status = ainf::dispatch(args, output);
    std::fputs(output.c_str(), stdout);
    return status;
}
