#include "chebrec/cli.hpp"

int main(int argc, char** argv) { return chebrec::cli_main(argc, argv); }
