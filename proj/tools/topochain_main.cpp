#include "topochain/runner.hpp"

int main(int argc, char** argv) { return topochain::cli::run_cli(argc, argv); }
