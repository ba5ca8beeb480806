#include "slab/cli.hpp"

int main(int argc, char** argv) { return slab::cli::run(argc, argv); }
