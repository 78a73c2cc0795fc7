#pragma once

namespace tanhshift::cli {

// Full command-line entry point; returns the process exit code
// (0 success, 2 argument errors, 1 runtime errors).
int run(int argc, const char* const* argv);

}  // namespace tanhshift::cli
