#pragma once

#include <string>

namespace tanhshift {

// Shortest decimal string that round-trips the double exactly. Keeps CSV
// and JSON outputs byte-stable across runs on one platform.
std::string format_double(double x);

}  // namespace tanhshift
