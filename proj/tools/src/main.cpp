#include "cohertherm/cli/scenarios.hpp"

int main(int argc, char** argv)
{
    return cohertherm::cli::run_cli(argc, argv);
}
