#include "fracdyn/cli.hpp"

int main(int argc, char** argv) { return fracdyn::cli::run_cli(argc, argv); }
