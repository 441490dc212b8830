#include "remst/cli.hpp"

int main(int argc, char** argv) { return remst::cli::run_cli(argc, argv); }
