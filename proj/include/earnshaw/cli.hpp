#pragma once

#include <iosfwd>
#include <string>

#include "earnshaw/errors.hpp"

namespace earnshaw::cli {

enum ExitCode : int { kOk = 0, kValidation = 2, kConvergence = 3, kTruncation = 4 };

/// Exit code for a library error and its class name for diagnostics.
int exit_code_for(const Error& error);
std::string error_kind(const Error& error);

/// Entry point of the command-line tool. CSV goes to the configured output
/// path or `out`; diagnostics go to `err` as one JSON object per line.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace earnshaw::cli
