#pragma once

#include <string>
#include <vector>

namespace stkde {

/// Runs the command-line pipeline. args excludes the program name.
/// Exit status: 0 success, 1 usage error, 2 data/validation error.
int cli_run(std::vector<std::string> args);

}  // namespace stkde
