#include "sbpm/engine.hpp"

#include <algorithm>
#include <set>

namespace sbpm {

namespace {

std::uint64_t mix(std::uint64_t x) noexcept {
  // splitmix64 finalizer
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string escape_field(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '%':
      case ' ':
      case '\t':
      case '\n':
      case '\r':
      case '=':
      case ';':
      case ',': {
        static constexpr char hex[] = "0123456789ABCDEF";
        out += '%';
        out += hex[(static_cast<unsigned char>(c) >> 4) & 0xf];
        out += hex[static_cast<unsigned char>(c) & 0xf];
        break;
      }
      default:
        out += c;
    }
  }
  return out;
}

const Transition* normal_transition(const Behavior& b, const State& s,
                                    std::string_view guard) {
  for (auto& t : b.transitions)
    if (t.from_state == s.id && t.kind == TransitionKind::Normal
        && t.guard == guard)
      return &t;
  return nullptr;
}

const Transition* timeout_transition(const Behavior& b, const State& s) {
  for (auto& t : b.transitions)
    if (t.from_state == s.id && t.kind == TransitionKind::Timeout)
      return &t;
  return nullptr;
}

[[noreturn]] void mismatch(const Move& m, std::string_view why) {
  throw Error("WitnessMismatch",
              "move '" + to_string(m) + "' cannot be replayed: "
                + std::string{why});
}

} // namespace

std::string_view to_string(InstanceStatus s) {
  switch (s) {
    case InstanceStatus::Running:
      return "Running";
    case InstanceStatus::Completed:
      return "Completed";
    case InstanceStatus::Deadlocked:
      return "Deadlocked";
    case InstanceStatus::StepLimit:
      return "StepLimit";
  }
  return "Running";
}

std::optional<InstanceStatus> parse_instance_status(std::string_view text) {
  for (auto s : {InstanceStatus::Running, InstanceStatus::Completed,
                 InstanceStatus::Deadlocked, InstanceStatus::StepLimit})
    if (to_string(s) == text)
      return s;
  return std::nullopt;
}

std::string_view to_string(EventKind k) {
  switch (k) {
    case EventKind::Sent:
      return "Sent";
    case EventKind::Received:
      return "Received";
    case EventKind::ActionTaken:
      return "ActionTaken";
    case EventKind::TimeoutFired:
      return "TimeoutFired";
    case EventKind::EnteredEnd:
      return "EnteredEnd";
    case EventKind::Blocked:
      return "Blocked";
  }
  return "Sent";
}

std::optional<EventKind> parse_event_kind(std::string_view text) {
  for (auto k : {EventKind::Sent, EventKind::Received, EventKind::ActionTaken,
                 EventKind::TimeoutFired, EventKind::EnteredEnd,
                 EventKind::Blocked})
    if (to_string(k) == text)
      return k;
  return std::nullopt;
}

std::string_view to_string(MoveKind k) {
  switch (k) {
    case MoveKind::Send:
      return "send";
    case MoveKind::Receive:
      return "receive";
    case MoveKind::Action:
      return "action";
    case MoveKind::Timeout:
      return "timeout";
    case MoveKind::Finish:
      return "finish";
  }
  return "send";
}

std::string to_string(const Move& m) {
  std::string out = m.agent_id + "@" + m.from_state + " "
                    + std::string{to_string(m.kind)};
  if (m.kind == MoveKind::Action)
    out += "#" + std::to_string(m.outcome);
  return out;
}

std::string to_string(const GlobalStateView& view) {
  std::string out;
  for (auto& a : view) {
    if (!out.empty())
      out += ' ';
    out += a.agent + "@" + a.state + "[";
    for (size_t i = 0; i < a.mailbox.size(); ++i) {
      if (i > 0)
        out += ',';
      out += a.mailbox[i].sender + ":" + a.mailbox[i].message_id;
    }
    out += "]";
  }
  return out;
}

std::string to_line(const TraceEvent& e) {
  std::string out = std::to_string(e.seq) + "\t" + std::to_string(e.time) + "\t"
                    + e.agent + "\t" + std::string{to_string(e.kind)} + "\t";
  std::vector<std::string> parts;
  auto field = [&](std::string_view key, std::string_view value) {
    parts.push_back(std::string{key} + "=" + escape_field(value));
  };
  switch (e.kind) {
    case EventKind::Sent: {
      field("message", e.message_id);
      field("to", e.peer);
      std::string ds;
      for (auto& d : e.deliveries) {
        if (!ds.empty())
          ds += ',';
        ds += std::to_string(d.uid) + "@" + escape_field(d.to_agent);
      }
      parts.push_back("deliveries=" + ds);
      break;
    }
    case EventKind::Received:
      field("message", e.message_id);
      field("from", e.peer);
      parts.push_back("uid=" + std::to_string(e.uid));
      field("branch", e.outcome);
      break;
    case EventKind::ActionTaken:
      field("outcome", e.outcome);
      break;
    default:
      break;
  }
  if (e.to_state.empty())
    field("state", e.from_state);
  else
    parts.push_back("state=" + escape_field(e.from_state) + "->"
                    + escape_field(e.to_state));
  for (auto& [k, v] : e.payload)
    parts.push_back("payload." + escape_field(k) + "=" + escape_field(v));
  return out + join(parts, " ");
}

std::string to_lines(const Trace& trace) {
  std::string out;
  for (auto& e : trace.events) {
    out += to_line(e);
    out += '\n';
  }
  return out;
}

// -- ProcessInstance -----------------------------------------------------------

ProcessInstance::ProcessInstance(std::shared_ptr<const ProcessModel> model,
                                 SchedulerConfig config)
  : model_(std::move(model)), config_(std::move(config)), rng_(config_.seed) {
}

ProcessInstance
ProcessInstance::instantiate(std::shared_ptr<const ProcessModel> model,
                             SchedulerConfig config) {
  if (!model)
    throw Error("ModelInvalid", "no model");
  auto problems = well_formed(*model);
  if (problems.empty()) {
    auto more = interface_consistency(*model);
    problems.insert(problems.end(), more.begin(), more.end());
  }
  std::erase_if(problems, [](const Violation& v) {
    return v.severity != Severity::Error;
  });
  if (!problems.empty()) {
    std::vector<std::string> lines;
    for (auto& v : problems)
      lines.push_back(to_string(v));
    throw Error("ModelInvalid",
                "model '" + model->id + "' fails validation with "
                  + std::to_string(problems.size()) + " violation(s)",
                join(lines, "\n"));
  }
  for (auto& [sid, k] : config.multiplicities) {
    auto* s = model->find_subject(sid);
    if (!s || s->kind != SubjectKind::Multi)
      throw Error("BadMultiplicity",
                  "multiplicity given for '" + sid + "', which is not a multi "
                  "subject");
    if (k < 1)
      throw Error("BadMultiplicity",
                  "multiplicity for '" + sid + "' must be at least 1");
  }
  ProcessInstance inst{std::move(model), std::move(config)};
  for (auto& s : inst.model_->subjects) {
    if (s.kind == SubjectKind::External)
      continue;
    int count = 1;
    if (s.kind == SubjectKind::Multi) {
      auto it = inst.config_.multiplicities.find(s.id);
      count = it != inst.config_.multiplicities.end() ? it->second
                                                      : s.multiplicity_default;
    }
    for (int r = 0; r < count; ++r) {
      AgentInstance a;
      a.id = s.kind == SubjectKind::Multi ? s.id + "#" + std::to_string(r)
                                          : s.id;
      a.subject_id = s.id;
      a.replica = r;
      inst.enter(a, s.behavior->start_state()->id);
      inst.agents_.push_back(std::move(a));
    }
  }
  return inst;
}

ProcessInstance ProcessInstance::instantiate(const ProcessModel& model,
                                             SchedulerConfig config) {
  return instantiate(std::make_shared<const ProcessModel>(model),
                     std::move(config));
}

const State& ProcessInstance::state_of(const AgentInstance& a) const {
  auto& beh = *model_->find_subject(a.subject_id)->behavior;
  return *beh.find_state(a.current_state);
}

std::optional<std::size_t>
ProcessInstance::matching_message(const AgentInstance& a) const {
  auto* recv = std::get_if<ReceiveActivity>(&state_of(a).activity);
  if (!recv)
    return std::nullopt;
  // Selective receive: only the oldest message of each sender is eligible,
  // which keeps per-sender order while skipping unrelated senders.
  std::set<std::string_view> seen;
  for (std::size_t i = 0; i < a.mailbox.size(); ++i) {
    auto& m = a.mailbox[i];
    if (!seen.insert(m.from_agent).second)
      continue;
    for (auto& br : recv->branches)
      if (br.source_subject == m.from_subject && br.message_id == m.message_id)
        return i;
  }
  return std::nullopt;
}

bool ProcessInstance::ready(std::size_t agent) const {
  auto& a = agents_.at(agent);
  if (a.finished)
    return false;
  auto& s = state_of(a);
  if (s.is_end || s.kind() != ActivityKind::Receive)
    return true;
  if (matching_message(a))
    return true;
  return a.wait_deadline && clock_ >= *a.wait_deadline;
}

std::optional<std::size_t> ProcessInstance::pick() {
  const auto n = agents_.size();
  if (config_.policy == SchedulingPolicy::RoundRobin) {
    for (std::size_t k = 0; k < n; ++k) {
      auto i = (cursor_ + k) % n;
      if (ready(i)) {
        cursor_ = (i + 1) % n;
        return i;
      }
    }
    return std::nullopt;
  }
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < n; ++i)
    if (ready(i))
      candidates.push_back(i);
  if (candidates.empty())
    return std::nullopt;
  return candidates[rng_() % candidates.size()];
}

std::size_t ProcessInstance::select_outcome(const AgentInstance& a,
                                            std::size_t n) const {
  if (n <= 1)
    return 0;
  auto visit = a.visits.at(a.current_state);
  auto h = mix(config_.seed ^ fnv1a(a.id));
  h = mix(h ^ visit);
  return static_cast<std::size_t>(h % n);
}

Move ProcessInstance::default_move(std::size_t agent) const {
  auto& a = agents_[agent];
  auto& s = state_of(a);
  Move m{agent, a.id, a.current_state, MoveKind::Send, 0};
  if (s.is_end) {
    m.kind = MoveKind::Finish;
  } else if (s.kind() == ActivityKind::Send) {
    m.kind = MoveKind::Send;
  } else if (s.kind() == ActivityKind::Action) {
    m.kind = MoveKind::Action;
    m.outcome = select_outcome(
      a, std::get<ActionActivity>(s.activity).outcomes.size());
  } else {
    m.kind = matching_message(a) ? MoveKind::Receive : MoveKind::Timeout;
  }
  return m;
}

void ProcessInstance::enter(AgentInstance& a, const std::string& state_id) {
  a.current_state = state_id;
  ++a.visits[state_id];
  a.wait_deadline.reset();
  auto& beh = *model_->find_subject(a.subject_id)->behavior;
  auto& s = *beh.find_state(state_id);
  if (s.is_end || s.kind() != ActivityKind::Receive)
    return;
  if (auto* t = timeout_transition(beh, s))
    a.wait_deadline = clock_ + t->timeout;
}

std::vector<std::size_t>
ProcessInstance::agents_of(std::string_view subject) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < agents_.size(); ++i)
    if (agents_[i].subject_id == subject)
      out.push_back(i);
  return out;
}

bool ProcessInstance::all_finished() const {
  return std::all_of(agents_.begin(), agents_.end(),
                     [](const AgentInstance& a) { return a.finished; });
}

TraceEvent& ProcessInstance::append(TraceEvent e) {
  e.seq = trace_.events.size();
  e.time = clock_;
  trace_.events.push_back(std::move(e));
  return trace_.events.back();
}

TraceEvent ProcessInstance::execute(std::size_t agent, MoveKind kind,
                                    std::size_t outcome) {
  auto& a = agents_[agent];
  const auto& beh = *model_->find_subject(a.subject_id)->behavior;
  const auto& s = *beh.find_state(a.current_state);
  TraceEvent e;
  e.agent = a.id;
  e.from_state = s.id;
  const Transition* next = nullptr;
  switch (kind) {
    case MoveKind::Finish:
      a.finished = true;
      a.wait_deadline.reset();
      e.kind = EventKind::EnteredEnd;
      break;
    case MoveKind::Send: {
      auto& send = std::get<SendActivity>(s.activity);
      auto* type = model_->find_message(send.message_id);
      Payload payload;
      for (auto& key : type->payload_schema)
        if (auto it = a.variables.find(key); it != a.variables.end())
          payload.emplace(key, it->second);
      e.kind = EventKind::Sent;
      e.message_id = send.message_id;
      e.peer = send.target_subject;
      e.payload = payload;
      for (auto target : agents_of(send.target_subject)) {
        MessageInstance m{next_uid_++, send.message_id, a.id,
                          a.subject_id, agents_[target].id, payload, clock_};
        e.deliveries.push_back({m.uid, m.to_agent});
        agents_[target].mailbox.push_back(std::move(m));
      }
      next = normal_transition(beh, s, "");
      break;
    }
    case MoveKind::Receive: {
      auto idx = *matching_message(a);
      auto m = std::move(a.mailbox[idx]);
      a.mailbox.erase(a.mailbox.begin() + static_cast<std::ptrdiff_t>(idx));
      for (auto& [k, v] : m.payload)
        a.variables[k] = v;
      auto label = branch_label({m.from_subject, m.message_id});
      e.kind = EventKind::Received;
      e.message_id = m.message_id;
      e.peer = m.from_agent;
      e.uid = m.uid;
      e.outcome = label;
      e.payload = std::move(m.payload);
      next = normal_transition(beh, s, label);
      break;
    }
    case MoveKind::Action: {
      auto& label = std::get<ActionActivity>(s.activity).outcomes.at(outcome);
      e.kind = EventKind::ActionTaken;
      e.outcome = label;
      next = normal_transition(beh, s, label);
      break;
    }
    case MoveKind::Timeout:
      clock_ = std::max(clock_, *a.wait_deadline);
      e.kind = EventKind::TimeoutFired;
      next = timeout_transition(beh, s);
      break;
  }
  if (next) {
    e.to_state = next->to_state;
    enter(a, next->to_state);
  }
  ++steps_;
  return append(std::move(e));
}

std::optional<TraceEvent> ProcessInstance::step() {
  auto agent = pick();
  if (!agent)
    return std::nullopt;
  auto m = default_move(*agent);
  return execute(*agent, m.kind, m.outcome);
}

TraceEvent ProcessInstance::apply(const Move& m) {
  if (m.agent >= agents_.size())
    mismatch(m, "no such agent");
  auto& a = agents_[m.agent];
  if (a.id != m.agent_id)
    mismatch(m, "agent is '" + a.id + "'");
  if (a.finished)
    mismatch(m, "agent already finished");
  if (a.current_state != m.from_state)
    mismatch(m, "agent rests in '" + a.current_state + "'");
  auto& s = state_of(a);
  bool ok = false;
  if (s.is_end) {
    ok = m.kind == MoveKind::Finish;
  } else {
    switch (m.kind) {
      case MoveKind::Send:
        ok = s.kind() == ActivityKind::Send;
        break;
      case MoveKind::Action:
        ok = s.kind() == ActivityKind::Action
             && m.outcome < std::get<ActionActivity>(s.activity).outcomes.size();
        break;
      case MoveKind::Receive:
        ok = s.kind() == ActivityKind::Receive && matching_message(a);
        break;
      case MoveKind::Timeout:
        ok = s.kind() == ActivityKind::Receive && a.wait_deadline.has_value();
        break;
      case MoveKind::Finish:
        ok = false;
        break;
    }
  }
  if (!ok)
    mismatch(m, "move not enabled");
  return execute(m.agent, m.kind, m.outcome);
}

bool ProcessInstance::advance_time() {
  std::optional<std::int64_t> earliest;
  for (auto& a : agents_)
    if (!a.finished && a.wait_deadline)
      earliest = earliest ? std::min(*earliest, *a.wait_deadline)
                          : *a.wait_deadline;
  if (!earliest)
    return false;
  clock_ = std::max(clock_, *earliest);
  return true;
}

bool ProcessInstance::detect_deadlock() const {
  bool unfinished = false;
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    if (ready(i))
      return false;
    auto& a = agents_[i];
    if (!a.finished) {
      unfinished = true;
      if (a.wait_deadline)
        return false;
    }
  }
  return unfinished;
}

InstanceStatus ProcessInstance::advance(std::uint64_t budget) {
  if (status_ != InstanceStatus::Running)
    return status_;
  std::uint64_t appended = 0;
  for (;;) {
    if (all_finished())
      return status_ = InstanceStatus::Completed;
    if (steps_ >= config_.max_steps)
      return status_ = InstanceStatus::StepLimit;
    if (appended >= budget)
      return status_;
    if (step()) {
      ++appended;
      continue;
    }
    if (advance_time())
      continue;
    for (auto& a : agents_) {
      if (a.finished)
        continue;
      TraceEvent e;
      e.agent = a.id;
      e.kind = EventKind::Blocked;
      e.from_state = a.current_state;
      append(std::move(e));
    }
    return status_ = InstanceStatus::Deadlocked;
  }
}

InstanceStatus ProcessInstance::run() {
  return advance(std::numeric_limits<std::uint64_t>::max());
}

void ProcessInstance::inject_message(std::string_view external_subject,
                                     std::string_view to,
                                     std::string_view message_id,
                                     Payload payload) {
  auto* ext = model_->find_subject(external_subject);
  if (!ext)
    throw Error("UnknownSubject",
                "unknown subject '" + std::string{external_subject} + "'");
  if (ext->kind != SubjectKind::External)
    throw Error("NotExternal", "subject '" + ext->id
                                 + "' is not external; only external subjects "
                                   "accept injected messages");
  if (!model_->has_channel(external_subject, to, message_id))
    throw Error("NoSuchChannel", "no channel " + ext->id + "->"
                                   + std::string{to} + " carrying '"
                                   + std::string{message_id} + "'");
  auto& schema = model_->find_message(message_id)->payload_schema;
  for (auto& [k, v] : payload)
    if (std::find(schema.begin(), schema.end(), k) == schema.end())
      throw Error("InvalidPayload", "payload key '" + k + "' is not part of '"
                                      + std::string{message_id} + "'");
  TraceEvent e;
  e.agent = ext->id;
  e.kind = EventKind::Sent;
  e.message_id = std::string{message_id};
  e.peer = std::string{to};
  e.payload = payload;
  for (auto target : agents_of(to)) {
    MessageInstance m{next_uid_++,        std::string{message_id},
                      ext->id,            ext->id,
                      agents_[target].id, payload,
                      clock_};
    e.deliveries.push_back({m.uid, m.to_agent});
    agents_[target].mailbox.push_back(std::move(m));
  }
  append(std::move(e));
  if (status_ == InstanceStatus::Deadlocked)
    status_ = InstanceStatus::Running;
}

GlobalStateView ProcessInstance::snapshot() const {
  GlobalStateView out;
  for (auto& a : agents_) {
    AgentView v{a.id, a.current_state, {}};
    for (auto& m : a.mailbox)
      v.mailbox.push_back({m.from_agent, m.message_id});
    out.push_back(std::move(v));
  }
  return out;
}

} // namespace sbpm
