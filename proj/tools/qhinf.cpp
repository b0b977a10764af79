#include "qhinf/cli.hpp"

int main(int argc, char** argv) { return qhinf::cli::main(argc, argv); }
