#include "cli.hpp"

int main(int argc, char** argv) { return pedallab::cli::run(argc, argv); }
