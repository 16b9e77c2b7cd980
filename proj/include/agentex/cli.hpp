#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace agentex::cli {

/// Exit codes of the command-line tool.
enum Exit : int { kOk = 0, kInfeasible = 1, kUsage = 2, kInvariant = 3 };

/// Runs one command. `args` excludes the program name. A path of "-" reads from `in`.
/// Structured JSON goes to `out`, a one-line summary and errors to `err`.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace agentex::cli
