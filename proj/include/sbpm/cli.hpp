#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sbpm {

/// Exit codes of the `sbpm` tool. Scripts depend on them.
enum ExitCode : int {
  exit_ok = 0,
  /// Usage error, unreadable or malformed input, unsupported version.
  exit_malformed = 1,
  /// run: instance Deadlocked. explore: at least one deadlock found.
  exit_deadlock = 2,
  /// run: StepLimit. explore: bounds cut the state space short.
  exit_limit = 3,
  /// validate found errors, analyze-notation found anomalies, or the input
  /// is well-formed but semantically invalid.
  exit_violations = 4,
};

/// Runs one command; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

} // namespace sbpm
