#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dahar::cli {

/// Runs one command line (program name excluded). Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dahar::cli
