#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace belief::cli {

enum ExitCode : int { ok = 0, usage = 1, data_error = 2, internal = 3 };

/// Parses and runs one subcommand. Nothing is written to output files unless
/// the whole command succeeds.
int dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);
int dispatch(int argc, char** argv);

}  // namespace belief::cli
