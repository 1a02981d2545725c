#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace freelyap::cli {

enum ExitCode : int { kOk = 0, kInputError = 2, kGateFailure = 3 };

/// Runs the command line `args` (without the program name). Normal output
/// goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// True when diagnostics may use ANSI colour: NO_COLOR unset and stderr is a
/// terminal.
bool color_enabled();

}  // namespace freelyap::cli
