#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "sbpm/engine.hpp"
#include "sbpm/model.hpp"

namespace sbpm {

struct ExplorationBounds {
  std::size_t max_states = 100000;
  /// Successors that would push any mailbox past this size are cut off.
  std::size_t max_mailbox = 4;
  std::size_t max_depth = 10000;
};

struct ExplorationOptions {
  /// Replica counts for Multi subjects, as in SchedulerConfig.
  std::map<std::string, int> multiplicities;
  /// Treat replicas of a Multi subject as interchangeable when deduplicating.
  bool symmetry_reduction = true;
};

struct DeadlockReport {
  GlobalStateView state;
  /// Shortest sequence of scheduler decisions from the initial state.
  std::vector<Move> witness;

  bool operator==(const DeadlockReport&) const = default;
};

struct ExplorationResult {
  std::size_t states = 0;
  std::size_t transitions = 0;
  std::vector<DeadlockReport> deadlocks;
  /// True iff the whole state space was explored within the bounds.
  bool complete = true;
  /// Some reachable state lies on a cycle, so runs may never terminate.
  bool may_diverge = false;
  /// Statuses a run can end in: Completed and Deadlocked for reachable
  /// terminal states, StepLimit when runs may diverge.
  std::set<InstanceStatus> terminal_statuses;
  /// Per non-external subject: some agent of it can reach an end state.
  std::map<std::string, bool> end_reachable;

  bool operator==(const ExplorationResult&) const = default;
};

/// Breadth-first enumeration of every interleaving: each ready agent
/// branches, each action outcome branches, and a receive with a timeout may
/// fire it at any point. Throws ModelInvalid.
ExplorationResult state_space(const ProcessModel& model,
                              const ExplorationBounds& bounds = {},
                              const ExplorationOptions& options = {});

std::vector<DeadlockReport> find_deadlocks(const ProcessModel& model,
                                           const ExplorationBounds& bounds = {},
                                           const ExplorationOptions& options = {});

struct ReplayResult {
  Trace trace;
  InstanceStatus status = InstanceStatus::Running;
  GlobalStateView state;
};

/// Drives the engine with the witness's decisions, then lets agents resting
/// in end states finish. Throws WitnessMismatch.
ReplayResult replay(const ProcessModel& model, const std::vector<Move>& witness,
                    const std::map<std::string, int>& multiplicities = {});

/// Human-readable step list for a deadlock.
std::string describe(const DeadlockReport& report);

} // namespace sbpm
