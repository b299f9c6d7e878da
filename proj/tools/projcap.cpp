#include "projcap/cli.hpp"

int main(int argc, char** argv) { return projcap::cli::main(argc, argv); }
