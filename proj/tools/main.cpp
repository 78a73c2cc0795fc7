#include "cli.hpp"

int main(int argc, char** argv) { return tanhshift::cli::run(argc, argv); }
