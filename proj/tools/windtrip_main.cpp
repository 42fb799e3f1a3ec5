#include <string>
#include <vector>

#include "windtrip/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return windtrip::run_cli(std::move(args));
}
