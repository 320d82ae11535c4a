#pragma once

#include <ostream>

namespace relayplan {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 2,       // malformed input or flags
    kExitInfeasible = 3,  // a demand cannot be planned as asked
    kExitInvalid = 4,     // schedule conflicts or flow mismatch
};

/// Entry point of the relayplan tool: subcommands plan, validate, eval.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace relayplan
