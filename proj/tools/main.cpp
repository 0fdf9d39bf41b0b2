#include "bfp/cli.hpp"

int main(int argc, char** argv) { return bfp::cli::main(argc, argv); }
