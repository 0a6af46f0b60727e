#include "adast/cli/commands.hpp"

int main(int argc, char** argv) { return adast::cli::run_cli(argc, argv); }
