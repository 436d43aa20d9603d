#include "gsi/cli.hpp"

int main(int argc, char** argv) { return gsi::cli::run(argc, argv); }
