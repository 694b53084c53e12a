#include "greente/harness.hpp"

int main(int argc, char** argv) { return greente::harness::cli_main(argc, argv); }
