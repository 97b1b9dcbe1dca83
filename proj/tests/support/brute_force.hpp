#pragma once

#include <optional>
#include <set>
#include <string>

#include "sbpm/engine.hpp"

namespace sbpm::testing {

struct BruteForce {
  std::set<InstanceStatus> terminal_statuses;
  /// Distinct deadlocked global states, rendered with to_string.
  std::set<std::string> deadlocks;
  std::size_t states = 0;
};

/// Depth-first search over engine instances: every move the engine accepts
/// through apply() is a successor, so the result reflects the engine's own
/// semantics with time abstracted away. StepLimit is reported when a state
/// can reach itself. Gives up (nullopt) beyond `limit` states.
std::optional<BruteForce> brute_force(const ProcessModel& model,
                                      std::size_t limit = 20000);

} // namespace sbpm::testing
