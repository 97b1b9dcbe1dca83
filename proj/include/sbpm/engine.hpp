#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sbpm/model.hpp"

namespace sbpm {

enum class InstanceStatus { Running, Completed, Deadlocked, StepLimit };

std::string_view to_string(InstanceStatus s);
std::optional<InstanceStatus> parse_instance_status(std::string_view text);

enum class SchedulingPolicy { RoundRobin, SeededRandom };

struct SchedulerConfig {
  SchedulingPolicy policy = SchedulingPolicy::RoundRobin;
  /// Drives agent selection under SeededRandom and action outcome selection
  /// under both policies.
  std::uint64_t seed = 0;
  std::uint64_t max_steps = 10000;
  /// Replica count per Multi subject; falls back to multiplicity_default.
  std::map<std::string, int> multiplicities;
};

using Payload = std::map<std::string, std::string>;

struct MessageInstance {
  std::uint64_t uid = 0;
  std::string message_id;
  std::string from_agent;
  std::string from_subject;
  std::string to_agent;
  Payload payload;
  std::int64_t send_time = 0;
};

struct AgentInstance {
  std::string id;
  std::string subject_id;
  int replica = 0;
  std::string current_state;
  std::deque<MessageInstance> mailbox;
  /// Set while resting in a Receive state that has a Timeout transition.
  std::optional<std::int64_t> wait_deadline;
  Payload variables;
  /// Set once the agent has announced that it rests in an end state.
  bool finished = false;
  std::map<std::string, std::uint64_t> visits;
};

enum class EventKind {
  Sent,
  Received,
  ActionTaken,
  TimeoutFired,
  EnteredEnd,
  Blocked
};

std::string_view to_string(EventKind k);
std::optional<EventKind> parse_event_kind(std::string_view text);

struct Delivery {
  std::uint64_t uid = 0;
  std::string to_agent;

  bool operator==(const Delivery&) const = default;
};

struct TraceEvent {
  std::uint64_t seq = 0;
  std::int64_t time = 0;
  std::string agent;
  EventKind kind = EventKind::Sent;
  std::string message_id;
  /// Sent: target subject. Received: sending agent.
  std::string peer;
  /// ActionTaken: outcome. Received: branch label.
  std::string outcome;
  std::string from_state;
  std::string to_state;
  /// Sent: one entry per mailbox the message landed in.
  std::vector<Delivery> deliveries;
  /// Received: uid of the consumed message.
  std::uint64_t uid = 0;
  Payload payload;

  bool operator==(const TraceEvent&) const = default;
};

struct Trace {
  std::vector<TraceEvent> events;

  bool operator==(const Trace&) const = default;
};

/// Line-delimited export: `seq<TAB>time<TAB>agent<TAB>kind<TAB>details`.
std::string to_lines(const Trace& trace);
std::string to_line(const TraceEvent& e);

/// A single scheduler decision, used to replay explorer witnesses.
enum class MoveKind { Send, Receive, Action, Timeout, Finish };

std::string_view to_string(MoveKind k);

struct Move {
  std::size_t agent = 0;
  std::string agent_id;
  std::string from_state;
  MoveKind kind = MoveKind::Send;
  /// Outcome index for Action moves.
  std::size_t outcome = 0;

  bool operator==(const Move&) const = default;
};

std::string to_string(const Move& m);

struct MailboxEntry {
  std::string sender;
  std::string message_id;

  bool operator==(const MailboxEntry&) const = default;
};

struct AgentView {
  std::string agent;
  std::string state;
  std::vector<MailboxEntry> mailbox;

  bool operator==(const AgentView&) const = default;
};

/// Control-relevant global state: per agent location and mailbox contents.
using GlobalStateView = std::vector<AgentView>;

std::string to_string(const GlobalStateView& view);

/// One running choreography. Stepping is strictly sequential, which makes
/// traces reproducible: identical model and configuration give identical
/// traces. Instances share nothing mutable and may run in parallel.
class ProcessInstance {
public:
  /// One agent per Standard subject, k per Multi subject, none for External
  /// subjects. Throws ModelInvalid or BadMultiplicity.
  static ProcessInstance instantiate(std::shared_ptr<const ProcessModel> model,
                                     SchedulerConfig config);

  static ProcessInstance instantiate(const ProcessModel& model,
                                     SchedulerConfig config);

  /// Executes one ready agent chosen by the scheduler. Returns nullopt when
  /// no agent is ready.
  std::optional<TraceEvent> step();

  /// Jumps the clock to the earliest pending receive deadline. Returns false
  /// if nothing waits on a deadline.
  bool advance_time();

  bool detect_deadlock() const;

  /// Steps and advances time until the instance completes, deadlocks, or
  /// reaches max_steps.
  InstanceStatus run();

  /// Like run() but stops after appending at most `budget` events.
  InstanceStatus advance(std::uint64_t budget);

  /// Delivers a message on behalf of an External subject. Throws
  /// UnknownSubject, NotExternal, NoSuchChannel or InvalidPayload.
  void inject_message(std::string_view external_subject, std::string_view to,
                      std::string_view message_id, Payload payload = {});

  /// Applies a forced scheduler decision. Throws WitnessMismatch when the
  /// move is not enabled in the current state.
  TraceEvent apply(const Move& move);

  /// Moves the scheduler would consider for `agent` right now.
  bool ready(std::size_t agent) const;

  GlobalStateView snapshot() const;

  const ProcessModel& model() const noexcept {
    return *model_;
  }
  const SchedulerConfig& config() const noexcept {
    return config_;
  }
  const std::vector<AgentInstance>& agents() const noexcept {
    return agents_;
  }
  const Trace& trace() const noexcept {
    return trace_;
  }
  InstanceStatus status() const noexcept {
    return status_;
  }
  std::int64_t clock() const noexcept {
    return clock_;
  }
  std::uint64_t steps() const noexcept {
    return steps_;
  }

private:
  ProcessInstance(std::shared_ptr<const ProcessModel> model,
                  SchedulerConfig config);

  const State& state_of(const AgentInstance& a) const;
  std::optional<std::size_t> matching_message(const AgentInstance& a) const;
  std::optional<std::size_t> pick();
  Move default_move(std::size_t agent) const;
  TraceEvent execute(std::size_t agent, MoveKind kind, std::size_t outcome);
  void enter(AgentInstance& a, const std::string& state_id);
  std::size_t select_outcome(const AgentInstance& a, std::size_t n) const;
  TraceEvent& append(TraceEvent e);
  std::vector<std::size_t> agents_of(std::string_view subject) const;
  bool all_finished() const;

  std::shared_ptr<const ProcessModel> model_;
  SchedulerConfig config_;
  std::vector<AgentInstance> agents_;
  std::int64_t clock_ = 0;
  Trace trace_;
  InstanceStatus status_ = InstanceStatus::Running;
  std::uint64_t steps_ = 0;
  std::uint64_t next_uid_ = 1;
  std::size_t cursor_ = 0;
  std::mt19937_64 rng_;
};

} // namespace sbpm
