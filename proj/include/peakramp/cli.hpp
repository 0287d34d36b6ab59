#pragma once

namespace peakramp::cli {

/// Entry point of the command-line driver. Exit codes: 0 success, 1 solver
/// failure, 2 invalid input.
int run(int argc, char** argv);

}  // namespace peakramp::cli
