#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rttqe {

/// Exit codes: 0 success, 1 validation error, 2 translator/transport failure.
enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitTranslator = 2 };

/// Runs `rtt-qe <subcommand> [flags]`; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rttqe
