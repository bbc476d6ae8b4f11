#include "xylab/cli.hpp"

int main(int argc, char** argv) { return xylab::run_cli(argc, argv); }
