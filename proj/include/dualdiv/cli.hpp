#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dualdiv::cli {

enum ExitCode : int {
    kOk = 0,
    kValidation = 2,
    kDegenerate = 3,
    kVerificationFailed = 4,
};

/// Runs one command line (args excludes the program name). Normal output
/// goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dualdiv::cli
