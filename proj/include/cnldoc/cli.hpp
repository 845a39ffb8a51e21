#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cnldoc {

/// Runs the command line (arguments after the program name). Returns the
/// exit code: 0 success or consistent, 1 violations or rejection, 2 usage,
/// parse, or file errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cnldoc
