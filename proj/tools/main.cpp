#include "mexp/cli.hpp"

int main(int argc, char** argv) { return mexp::run_cli(argc, argv); }
