#include "collapse/cli.hpp"

int main(int argc, char** argv) { return collapse::cli::run_cli(argc, argv); }
