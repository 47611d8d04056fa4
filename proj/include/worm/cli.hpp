#pragma once

#include <string>
#include <vector>

namespace worm::cli {

/// Runs one CLI invocation (args exclude the program name). Returns the
/// process exit code: 0 success, 1 validation error, 2 numeric failure.
int run(const std::vector<std::string>& args);

}  // namespace worm::cli
