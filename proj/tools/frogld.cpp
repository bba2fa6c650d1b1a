#include "frogld/cli/cli.hpp"

int main(int argc, char** argv) { return frogld::cli::run(argc, argv); }
