#include "sbpm/model.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

namespace sbpm {

// -- lookups -------------------------------------------------------------------

const State* Behavior::find_state(std::string_view id) const {
  for (auto& s : states)
    if (s.id == id)
      return &s;
  return nullptr;
}

const State* Behavior::start_state() const {
  for (auto& s : states)
    if (s.is_start)
      return &s;
  return nullptr;
}

std::vector<const Transition*>
Behavior::outgoing(std::string_view state_id) const {
  std::vector<const Transition*> out;
  for (auto& t : transitions)
    if (t.from_state == state_id)
      out.push_back(&t);
  return out;
}

std::string branch_label(const ReceiveBranch& branch) {
  return branch.source_subject + ":" + branch.message_id;
}

std::string_view to_string(SubjectKind kind) {
  switch (kind) {
    case SubjectKind::Standard:
      return "standard";
    case SubjectKind::Multi:
      return "multi";
    case SubjectKind::External:
      return "external";
  }
  return "standard";
}

std::optional<SubjectKind> parse_subject_kind(std::string_view text) {
  if (text == "standard")
    return SubjectKind::Standard;
  if (text == "multi")
    return SubjectKind::Multi;
  if (text == "external")
    return SubjectKind::External;
  return std::nullopt;
}

const Subject* ProcessModel::find_subject(std::string_view id) const {
  for (auto& s : subjects)
    if (s.id == id)
      return &s;
  return nullptr;
}

const MessageType* ProcessModel::find_message(std::string_view id) const {
  for (auto& m : messages)
    if (m.id == id)
      return &m;
  return nullptr;
}

bool ProcessModel::has_channel(std::string_view from, std::string_view to,
                               std::string_view message) const {
  for (auto& c : channels) {
    if (c.from_subject != from || c.to_subject != to)
      continue;
    if (std::find(c.message_ids.begin(), c.message_ids.end(), message)
        != c.message_ids.end())
      return true;
  }
  return false;
}

// -- build_model ---------------------------------------------------------------

namespace {

std::string channel_element(const Channel& c) {
  return "channel:" + c.from_subject + "->" + c.to_subject;
}

template <class T, class Key>
void sort_by(std::vector<T>& xs, Key key) {
  std::stable_sort(xs.begin(), xs.end(), [&](const T& x, const T& y) {
    return key(x) < key(y);
  });
}

} // namespace

Checked<ProcessModel> build_model(ProcessModel parts) {
  std::vector<Violation> out;
  std::set<std::string> subject_ids;
  for (auto& s : parts.subjects) {
    if (s.id.empty())
      out.push_back(make_violation("EmptyId", "", "", "subject"));
    else if (!subject_ids.insert(s.id).second)
      out.push_back(make_violation("DuplicateId", s.id, "", "subject"));
    if (s.kind == SubjectKind::External && s.behavior)
      out.push_back(make_violation("ExternalWithBehavior", s.id, ""));
    if (s.kind != SubjectKind::External && !s.behavior)
      out.push_back(make_violation("MissingBehavior", s.id, ""));
    if (s.kind == SubjectKind::Multi && s.multiplicity_default < 1)
      out.push_back(make_violation("BadMultiplicity", s.id, "",
                                   std::to_string(s.multiplicity_default)));
  }
  std::set<std::string> message_ids;
  for (auto& m : parts.messages) {
    if (m.id.empty())
      out.push_back(make_violation("EmptyId", "", "", "message"));
    else if (!message_ids.insert(m.id).second)
      out.push_back(make_violation("DuplicateId", "", m.id, "message"));
    std::set<std::string> keys;
    for (auto& k : m.payload_schema) {
      if (k.empty())
        out.push_back(make_violation("EmptyId", "", m.id, "payload key"));
      else if (!keys.insert(k).second)
        out.push_back(make_violation("DuplicatePayloadKey", "", m.id, k));
    }
  }
  std::set<std::tuple<std::string, std::string, std::string>> triples;
  for (auto& c : parts.channels) {
    auto element = channel_element(c);
    if (!subject_ids.count(c.from_subject))
      out.push_back(make_violation("DanglingReference", c.from_subject,
                                   element, "subject " + c.from_subject));
    if (!subject_ids.count(c.to_subject))
      out.push_back(make_violation("DanglingReference", c.from_subject,
                                   element, "subject " + c.to_subject));
    if (c.from_subject == c.to_subject)
      out.push_back(make_violation("SelfChannel", c.from_subject, element));
    if (c.message_ids.empty())
      out.push_back(make_violation("EmptyChannel", c.from_subject, element));
    for (auto& m : c.message_ids) {
      if (!message_ids.count(m))
        out.push_back(make_violation("DanglingReference", c.from_subject,
                                     element, "message " + m));
      if (!triples.emplace(c.from_subject, c.to_subject, m).second)
        out.push_back(make_violation("DuplicateChannel", c.from_subject,
                                     element, m));
    }
  }
  if (!out.empty()) {
    normalize(out);
    return out;
  }
  // Normalize into canonical order.
  sort_by(parts.subjects, [](const Subject& s) { return s.id; });
  sort_by(parts.messages, [](const MessageType& m) { return m.id; });
  for (auto& s : parts.subjects) {
    if (s.kind != SubjectKind::Multi)
      s.multiplicity_default = 1;
    if (s.behavior) {
      sort_by(s.behavior->states, [](const State& x) { return x.id; });
      sort_by(s.behavior->transitions,
              [](const Transition& x) { return x.id; });
    }
  }
  std::map<std::pair<std::string, std::string>, std::set<std::string>> merged;
  for (auto& c : parts.channels)
    merged[{c.from_subject, c.to_subject}].insert(c.message_ids.begin(),
                                                  c.message_ids.end());
  parts.channels.clear();
  for (auto& [key, msgs] : merged)
    parts.channels.push_back(
      Channel{key.first, key.second, {msgs.begin(), msgs.end()}});
  return parts;
}

// -- well_formed ---------------------------------------------------------------

namespace {

void check_behavior(const ProcessModel& model, const Subject& subject,
                    const Behavior& b, std::vector<Violation>& out) {
  const auto& sid = subject.id;
  std::set<std::string> state_ids;
  size_t starts = 0;
  size_t ends = 0;
  for (auto& s : b.states) {
    if (s.id.empty())
      out.push_back(make_violation("EmptyId", sid, "", "state"));
    else if (!state_ids.insert(s.id).second)
      out.push_back(make_violation("DuplicateId", sid, s.id, "state"));
    starts += s.is_start ? 1 : 0;
    ends += s.is_end ? 1 : 0;
    std::visit(
      [&](auto& act) {
        using T = std::decay_t<decltype(act)>;
        if constexpr (std::is_same_v<T, SendActivity>) {
          if (!model.find_subject(act.target_subject))
            out.push_back(make_violation("DanglingReference", sid, s.id,
                                         "subject " + act.target_subject));
          if (!model.find_message(act.message_id))
            out.push_back(make_violation("DanglingReference", sid, s.id,
                                         "message " + act.message_id));
        } else if constexpr (std::is_same_v<T, ReceiveActivity>) {
          if (act.branches.empty())
            out.push_back(make_violation("EmptyReceive", sid, s.id));
          std::set<std::string> labels;
          for (auto& br : act.branches) {
            if (!model.find_subject(br.source_subject))
              out.push_back(make_violation("DanglingReference", sid, s.id,
                                           "subject " + br.source_subject));
            if (!model.find_message(br.message_id))
              out.push_back(make_violation("DanglingReference", sid, s.id,
                                           "message " + br.message_id));
            if (!labels.insert(branch_label(br)).second)
              out.push_back(make_violation("DuplicateBranch", sid, s.id,
                                           branch_label(br)));
          }
        } else {
          if (act.outcomes.empty())
            out.push_back(make_violation("EmptyAction", sid, s.id));
          std::set<std::string> labels;
          for (auto& o : act.outcomes)
            if (!labels.insert(o).second)
              out.push_back(make_violation("DuplicateOutcome", sid, s.id, o));
        }
      },
      s.activity);
  }
  if (starts == 0)
    out.push_back(make_violation("MissingStart", sid, ""));
  if (starts > 1)
    out.push_back(make_violation("MultipleStart", sid, "",
                                 std::to_string(starts) + " start states"));
  if (ends == 0)
    out.push_back(make_violation("MissingEnd", sid, ""));

  std::set<std::string> transition_ids;
  for (auto& t : b.transitions) {
    if (t.id.empty())
      out.push_back(make_violation("EmptyId", sid, "", "transition"));
    else if (!transition_ids.insert(t.id).second)
      out.push_back(make_violation("DuplicateId", sid, t.id, "transition"));
    if (!b.find_state(t.from_state))
      out.push_back(make_violation("DanglingReference", sid, t.id,
                                   "state " + t.from_state));
    if (!b.find_state(t.to_state))
      out.push_back(make_violation("DanglingReference", sid, t.id,
                                   "state " + t.to_state));
    if (t.kind == TransitionKind::Timeout && t.timeout < 0)
      out.push_back(make_violation("NegativeTimeout", sid, t.id));
  }

  // Transition shape per source state.
  for (auto& s : b.states) {
    auto outs = b.outgoing(s.id);
    if (s.is_end) {
      for (auto* t : outs)
        out.push_back(make_violation("EndHasOutgoing", sid, t->id));
      continue;
    }
    std::vector<const Transition*> normal;
    size_t timeouts = 0;
    for (auto* t : outs) {
      if (t->kind == TransitionKind::Normal) {
        normal.push_back(t);
        continue;
      }
      ++timeouts;
      if (s.kind() != ActivityKind::Receive)
        out.push_back(make_violation("TimeoutNotFromReceive", sid, t->id));
    }
    if (timeouts > 1)
      out.push_back(make_violation("MultipleTimeout", sid, s.id));
    auto check_labels = [&](std::vector<std::string> expected) {
      std::multiset<std::string> got;
      for (auto* t : normal)
        got.insert(t->guard);
      std::multiset<std::string> want(expected.begin(), expected.end());
      if (got != want) {
        std::vector<std::string> g(got.begin(), got.end());
        out.push_back(make_violation("TransitionShape", sid, s.id,
                                     "expected guards [" + join(expected, ",")
                                       + "] found [" + join(g, ",") + "]"));
      }
    };
    switch (s.kind()) {
      case ActivityKind::Send:
        if (normal.size() != 1 || !normal.front()->guard.empty())
          out.push_back(make_violation(
            "TransitionShape", sid, s.id,
            "send needs exactly one unguarded transition, found "
              + std::to_string(normal.size())));
        break;
      case ActivityKind::Receive: {
        std::vector<std::string> labels;
        for (auto& br : std::get<ReceiveActivity>(s.activity).branches)
          labels.push_back(branch_label(br));
        check_labels(std::move(labels));
        break;
      }
      case ActivityKind::Action:
        check_labels(std::get<ActionActivity>(s.activity).outcomes);
        break;
    }
  }
}

} // namespace

std::vector<Violation> well_formed(const ProcessModel& model) {
  std::vector<Violation> out;
  for (auto& s : model.subjects)
    if (s.behavior)
      check_behavior(model, s, *s.behavior, out);
  normalize(out);
  return out;
}

// -- interface_consistency ------------------------------------------------------

std::vector<Violation> interface_consistency(const ProcessModel& model) {
  std::vector<Violation> out;
  std::set<std::tuple<std::string, std::string, std::string>> used;
  for (auto& subj : model.subjects) {
    if (!subj.behavior)
      continue;
    for (auto& s : subj.behavior->states) {
      if (auto* send = std::get_if<SendActivity>(&s.activity)) {
        used.emplace(subj.id, send->target_subject, send->message_id);
        if (!model.has_channel(subj.id, send->target_subject,
                               send->message_id))
          out.push_back(make_violation("UnmatchedSend", subj.id, s.id,
                                       send->target_subject + ":"
                                         + send->message_id));
      } else if (auto* recv = std::get_if<ReceiveActivity>(&s.activity)) {
        for (auto& br : recv->branches)
          if (!model.has_channel(br.source_subject, subj.id, br.message_id))
            out.push_back(make_violation("UnmatchedReceive", subj.id, s.id,
                                         branch_label(br)));
      }
    }
  }
  for (auto& c : model.channels) {
    // Channels leaving an External subject are driven by message injection.
    auto* from = model.find_subject(c.from_subject);
    if (from && from->kind == SubjectKind::External)
      continue;
    for (auto& m : c.message_ids)
      if (!used.count({c.from_subject, c.to_subject, m}))
        out.push_back(make_warning("UnusedChannel", c.from_subject,
                                   channel_element(c), m));
  }
  normalize(out);
  return out;
}

const Behavior& drill_down(const ProcessModel& model,
                           std::string_view subject) {
  auto* s = model.find_subject(subject);
  if (!s)
    throw Error("UnknownSubject", "unknown subject '" + std::string{subject}
                                    + "'");
  if (s->kind == SubjectKind::External || !s->behavior)
    throw Error("ExternalHasNoBehavior",
                "subject '" + s->id + "' is external; its behavior is unknown");
  return *s->behavior;
}

} // namespace sbpm
