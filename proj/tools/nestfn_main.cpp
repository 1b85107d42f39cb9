#include <iostream>
#include <vector>

#include "nestfn/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    const nestfn::cli::CommandOutcome outcome = nestfn::cli::run(args, std::cin);
    std::cout << outcome.stdout_payload;
    std::cerr << outcome.stderr_diagnostics;
    return outcome.exit_code;
}
