#pragma once

#include <iosfwd>

namespace crnerg {

/// Process exit codes; a stable contract documented in docs/report-schema.md.
enum ExitCode : int {
    kExitOk = 0,            // certified / feasible / success
    kExitRefuted = 1,       // refuted / infeasible
    kExitInconclusive = 2,
    kExitPrerequisite = 3,  // analysis prerequisite not met (wrong mode, non-Hurwitz, ...)
    kExitUsage = 64,        // bad flags or malformed network text
    kExitNoInput = 66,      // input file cannot be opened
    kExitInternal = 70,
};

/// Entry point of the `crnerg` tool. `color` enables ANSI colors in text
/// output; it is ignored when NO_COLOR is set.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err, bool color = false);

}  // namespace crnerg
