#include "unitystyle/cli/commands.hpp"

int main(int argc, char** argv) { return unitystyle::cli::run_cli(argc, argv); }
