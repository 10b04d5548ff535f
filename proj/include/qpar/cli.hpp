#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qpar {

// Dispatches one subcommand. Returns the process exit code: 0 on success,
// 1 on usage or parse errors, 2 on validation failures and tripped guards.
// Identical arguments and inputs produce byte-identical output.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qpar
