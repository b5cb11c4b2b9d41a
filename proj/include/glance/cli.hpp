#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace glance {

// Dispatches one command line (without the program name) and returns the
// process exit code: 0 success, 1 validation/usage error, 2 runtime failure.
int run_command(const std::vector<std::string>& args, std::ostream& out,
                std::ostream& err);

}  // namespace glance
