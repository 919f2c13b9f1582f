#include "toprec/cli.hpp"

int main(int argc, char** argv) { return toprec::cli::run(argc, argv); }
