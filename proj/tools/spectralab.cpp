#include "spectralab/cli.hpp"

int main(int argc, char** argv) { return spectralab::cli::run(argc, argv); }
