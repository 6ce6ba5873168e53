#include "fdrlink/experiments/cli.hpp"

int main(int argc, char** argv) { return fdrlink::experiments::run_cli(argc, argv); }
