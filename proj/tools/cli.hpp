#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace polyseg::cli {

// Runs one polyseg invocation. `args` excludes the program name. Returns
// the process exit code: 0 ok, 2 usage, 3 data or format, 4 numeric.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace polyseg::cli
