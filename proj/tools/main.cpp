#include "peakramp/cli.hpp"

int main(int argc, char** argv) { return peakramp::cli::run(argc, argv); }
