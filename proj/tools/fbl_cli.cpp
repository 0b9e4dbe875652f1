#include "cli.hpp"

int main(int argc, char** argv) { return fbl::cli::main(argc, argv); }
