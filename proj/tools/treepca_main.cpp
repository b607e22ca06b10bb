#include "treepca/cli.hpp"

int main(int argc, char** argv) { return treepca::run_cli(argc, argv); }
