#include "lqd/cli.hpp"

int main(int argc, char** argv) { return lqd::cli::main_entry(argc, argv); }
