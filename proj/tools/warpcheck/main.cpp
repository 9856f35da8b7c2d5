#include "cli.hpp"

int main(int argc, char** argv) { return warpcheck::cli::main_entry(argc, argv); }
