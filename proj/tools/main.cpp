#include "prosparse_cli.hpp"

int main(int argc, char** argv) { return prosparse::cli::run(argc, argv); }
