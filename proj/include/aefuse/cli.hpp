#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace aefuse::cli {

// Full command surface behind a callable entry point so tests can drive it
// in-process. args excludes argv[0]. Failures print one
// AEERR:<code>:<message> line to err and return the code.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace aefuse::cli
