#include "stbiholo/cli.hpp"

int main(int argc, char** argv) {
    return stbiholo::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
