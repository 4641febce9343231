#include "featnav/cli.hpp"

int main(int argc, char** argv) { return featnav::cli::run_main(argc, argv); }
