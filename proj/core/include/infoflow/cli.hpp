#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace infoflow {

/// Runs the command-line front end. Arguments exclude the program name.
/// Reports go to out, diagnostics to err.
///
/// Exit codes: 0 success (invariance: graphs equal); 1 parse or validation
/// failure; 2 inconclusive (Unknown edges present); 3 graphs differ /
/// counterexample found.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace infoflow
