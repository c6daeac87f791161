#include "cli.hpp"

int main(int argc, char** argv) { return duoboost::cli_run(argc, argv); }
