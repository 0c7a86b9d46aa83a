#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fspace::cli {

// "0.1.0-g<short git revision>"
std::string version_string();

// Runs the command line (program name excluded). Exit codes: 0 success,
// 2 invalid input, 3 refused by a parameter gate, 1 anything else.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace fspace::cli
