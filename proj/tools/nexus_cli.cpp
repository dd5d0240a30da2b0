#include "nexus/cli.hpp"

int main(int argc, char** argv) { return nexus::cli::cli_dispatch(argc, argv); }
