#include "cli.hpp"

int main(int argc, char** argv) { return belief::cli::dispatch(argc, argv); }
