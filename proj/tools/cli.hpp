#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace memdiscern::cli {

// Runs one CLI invocation. `args` excludes the program name. Returns the
// process exit status: 0 success, 2 usage, 3 format/data, 4 numeric.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace memdiscern::cli
