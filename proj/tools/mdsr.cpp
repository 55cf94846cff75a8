#include "mdsr/cli.hpp"

int main(int argc, char** argv) { return mdsr::cli::run(argc, argv); }
