#include "fspace/cli.hpp"

int main(int argc, char** argv) { return fspace::cli::run(argc, argv); }
