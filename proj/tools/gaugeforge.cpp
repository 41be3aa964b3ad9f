#include "gaugeforge/cli/commands.hpp"

int main(int argc, char** argv) { return gaugeforge::cli::run_cli(argc, argv); }
