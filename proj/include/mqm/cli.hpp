#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mqm {

/// Exit codes: 0 success, 1 a verification failed, 2 usage or input error,
/// 3 resource, precision or cache exhaustion.
enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2, kExitResource = 3 };

/// Runs the command line `args` (without the program name). Reports go to
/// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mqm
