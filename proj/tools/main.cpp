#include "subharmonic/cli.hpp"

int main(int argc, char** argv) { return subharmonic::cli::main_entry(argc, argv); }
