#include "kerrwig/cli.hpp"

int main(int argc, char** argv) { return kerrwig::cli::main_entry(argc, argv); }
