#include "gridsched/cli.hpp"

int main(int argc, char** argv) { return gridsched::run_cli(argc, argv); }
