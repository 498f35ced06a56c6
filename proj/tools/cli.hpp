#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace fpgp::cli {

// Process exit codes.
enum ExitCode : int {
    kSuccess = 0, // also MATCH
    kNonMatch = 1,
    kInputError = 2,
    kTrainingFailure = 3,
};

// Runs the command line `args` (without the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string sha256_hex(std::string_view bytes);

} // namespace fpgp::cli
