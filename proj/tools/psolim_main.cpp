#include "psolim/cli/cli.hpp"

int main(int argc, char** argv) {
    return psolim::cli::run_command(argc, argv);
}
