#include "shc/cli.hpp"

int main(int argc, char** argv)
{
    return shc::cli::run(argc, argv);
}
