#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sbpm/common.hpp"

namespace sbpm {

// -- Layer 2: subject behavior ------------------------------------------------

struct SendActivity {
  std::string target_subject;
  std::string message_id;

  bool operator==(const SendActivity&) const = default;
};

struct ReceiveBranch {
  std::string source_subject;
  std::string message_id;

  bool operator==(const ReceiveBranch&) const = default;
};

struct ReceiveActivity {
  std::vector<ReceiveBranch> branches;

  bool operator==(const ReceiveActivity&) const = default;
};

/// Outcome labels are opaque; the engine picks one at execution time.
struct ActionActivity {
  std::vector<std::string> outcomes;

  bool operator==(const ActionActivity&) const = default;
};

using Activity = std::variant<SendActivity, ReceiveActivity, ActionActivity>;

enum class ActivityKind { Send, Receive, Action };

struct State {
  std::string id;
  std::string label;
  Activity activity = ActionActivity{{"done"}};
  bool is_start = false;
  bool is_end = false;

  ActivityKind kind() const noexcept {
    return static_cast<ActivityKind>(activity.index());
  }

  bool operator==(const State&) const = default;
};

enum class TransitionKind { Normal, Timeout };

struct Transition {
  std::string id;
  std::string from_state;
  std::string to_state;
  TransitionKind kind = TransitionKind::Normal;
  /// Branch or outcome label for Normal transitions out of Receive and Action
  /// states. Empty for Send states and for Timeout transitions.
  std::string guard;
  /// Logical time units; only meaningful for Timeout transitions.
  std::int64_t timeout = 0;

  bool operator==(const Transition&) const = default;
};

struct Behavior {
  std::vector<State> states;
  std::vector<Transition> transitions;

  const State* find_state(std::string_view id) const;

  const State* start_state() const;

  /// Outgoing transitions of `state_id` in transition-id order.
  std::vector<const Transition*> outgoing(std::string_view state_id) const;

  bool operator==(const Behavior&) const = default;
};

/// Guard label that selects `branch` out of a Receive state.
std::string branch_label(const ReceiveBranch& branch);

// -- Layer 1: subject interaction ---------------------------------------------

enum class SubjectKind { Standard, Multi, External };

std::string_view to_string(SubjectKind kind);
std::optional<SubjectKind> parse_subject_kind(std::string_view text);

struct Subject {
  std::string id;
  std::string name;
  SubjectKind kind = SubjectKind::Standard;
  std::optional<Behavior> behavior;
  /// Number of replicas for Multi subjects when no override is configured.
  int multiplicity_default = 1;

  bool operator==(const Subject&) const = default;
};

/// Unidirectional channel; `message_ids` is kept sorted and unique.
struct Channel {
  std::string from_subject;
  std::string to_subject;
  std::vector<std::string> message_ids;

  bool operator==(const Channel&) const = default;
};

struct MessageType {
  std::string id;
  std::string name;
  std::vector<std::string> payload_schema;

  bool operator==(const MessageType&) const = default;
};

struct ProcessModel {
  std::string id;
  std::string name;
  std::vector<Subject> subjects;
  std::vector<Channel> channels;
  std::vector<MessageType> messages;

  const Subject* find_subject(std::string_view id) const;
  const MessageType* find_message(std::string_view id) const;
  bool has_channel(std::string_view from, std::string_view to,
                   std::string_view message) const;

  bool operator==(const ProcessModel&) const = default;
};

// -- Operations ----------------------------------------------------------------

/// Validates the model-level invariants and returns a normalized model
/// (subjects, messages, states and transitions sorted by id, channels merged
/// per subject pair), or every violation found.
Checked<ProcessModel> build_model(ProcessModel parts);

/// Behavior-level structure: start/end flags, references, transition shape.
std::vector<Violation> well_formed(const ProcessModel& model);

/// Sends and receives against declared channels. Unused channels are reported
/// as warnings.
std::vector<Violation> interface_consistency(const ProcessModel& model);

/// Read-only view of a subject's behavior. Throws `UnknownSubject` or
/// `ExternalHasNoBehavior`.
const Behavior& drill_down(const ProcessModel& model, std::string_view subject);

} // namespace sbpm
