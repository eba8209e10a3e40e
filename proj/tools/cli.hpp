#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tribus::cli {

enum ExitCode : int {
  kOk = 0,
  kParse = 2,
  kValidation = 3,
  kRuntime = 4,
};

/// Runs one command line (without the program name). Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Hex SHA-256 of the concatenated contents of `paths`, in order.
std::string hash_inputs(const std::vector<std::string>& paths);

}  // namespace tribus::cli
