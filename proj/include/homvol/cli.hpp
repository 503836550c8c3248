#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace homvol {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  exit_ok = 0,
  exit_input = 2,
  exit_infeasible = 3,
  exit_unconverged = 4,
  exit_certificate_fail = 5,
};

/// Runs one command; args excludes the program name. JSON goes to out,
/// CSV to --out or out, diagnostics to err.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace homvol
