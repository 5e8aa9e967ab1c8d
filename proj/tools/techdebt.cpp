#include "techdebt/cli.hpp"

int main(int argc, char** argv) { return techdebt::cli::run(argc, argv); }
