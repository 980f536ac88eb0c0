#include <string>
#include <vector>

#include "mcf4/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return mcf4::cli::run_command(args);
}
