#include <string>
#include <vector>

#include "riskroute/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return riskroute::run_cli(args);
}
