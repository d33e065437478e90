#include "hoa/commands.hpp"

int main(int argc, char** argv) { return hoa::cli::run_cli(argc, argv); }
