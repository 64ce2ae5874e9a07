#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hwdse::cli {

/// Runs the command-line front end. `args` excludes the program name.
/// Returns the process exit code: 0 on success, 2 configuration, 3 data,
/// 4 numerical, 5 not covered, 1 anything else. Errors are reported on `err`
/// as a single line: error: category=<name> message=<text>
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hwdse::cli
