#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace relusat::cli {

/// Runs one command line (without the program name). Exit codes: 0 for a
/// definitive verdict, 1 for unknown or timeout, 2 for usage and input errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace relusat::cli
