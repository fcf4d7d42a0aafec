#include "mpfluct/cli.hpp"

int main(int argc, char** argv) { return mpfluct::cli::cli_main(argc, argv); }
