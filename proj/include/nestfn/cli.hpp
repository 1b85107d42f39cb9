#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nestfn::cli {

/// Exit codes: 0 success; 2 invalid input/flags; 3 fit completed without
/// convergence; 4 domain error (NonPositiveBracket etc.); 5 internal
/// numerical breakdown.
struct CommandOutcome {
    int exit_code = 0;
    std::string stdout_payload;
    std::string stderr_diagnostics;
};

// Dispatches one subcommand. argv excludes the program name. stdin_stream is
// consumed only by `fit --input -`.
CommandOutcome run(const std::vector<std::string>& argv, std::istream& stdin_stream);

}  // namespace nestfn::cli
