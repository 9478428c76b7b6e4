#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace jetlag {

/// Command-line entry point, exposed as a function so tests can drive the
/// tool in-process. `args` excludes the program name. Returns the process
/// exit code: 0 on success, 1 on a runtime or verification failure, 2 on a
/// usage or parse error.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace jetlag
