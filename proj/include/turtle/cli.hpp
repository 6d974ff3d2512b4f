#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace turtle::cli {

/// Runs the `turtle` command line. `args` includes the program name.
/// Exit codes: 0 success, 1 rejected input or request error, 2 I/O failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace turtle::cli
