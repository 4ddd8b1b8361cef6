#include "freqmask/cli.hpp"

int main(int argc, char** argv) { return freqmask::run_cli(argc, argv); }
