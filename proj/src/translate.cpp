#include "sbpm/translate.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <set>

namespace sbpm {

namespace {

class Translator {
public:
  Translator(const NotationDefinition& notation) : notation_(notation) {
  }

  std::vector<Violation>& violations() {
    return out_;
  }

  // Construct of `block`, or empty after recording a violation.
  std::string construct_of(const Block& b, std::string_view layer) {
    auto cs = notation_.constructs_of(b.kind);
    if (cs.size() == 1)
      return cs.front();
    out_.push_back(make_violation(cs.empty() ? "UnmappedKind" : "OverloadedKind",
                                  std::string{layer}, b.id, b.kind));
    return {};
  }

  void check_direction(const BlockDiagram& d, std::string_view layer) {
    std::set<std::pair<std::string, std::string>> arrows;
    for (auto& a : d.arrows)
      arrows.emplace(std::min(a.from_block, a.to_block),
                     std::max(a.from_block, a.to_block));
    for (auto& pair : side_adjacent_pairs(d))
      if (!arrows.count(pair))
        out_.push_back(make_violation("AmbiguousDirection", std::string{layer},
                                      pair.first, "docked beside " + pair.second
                                                    + " across the flow axis"));
  }

  // Connections reduced to one per ordered pair; arrow labels win.
  static std::map<std::pair<std::string, std::string>, std::string>
  links(const BlockDiagram& d) {
    std::map<std::pair<std::string, std::string>, std::string> out;
    for (auto& c : infer_connections(d)) {
      auto& label = out[{c.from_block, c.to_block}];
      if (c.origin == ConnectionOrigin::Explicit)
        for (auto& a : d.arrows)
          if (a.id == c.via && !a.label.empty())
            label = a.label;
    }
    return out;
  }

  void interaction(const BlockDiagram& d, ProcessModel& model) {
    std::map<std::string, std::string> cons;
    for (auto& b : d.blocks)
      cons[b.id] = construct_of(b, "");
    auto is_subject = [&](const std::string& id) {
      auto& c = cons[id];
      return c == construct::subject || c == construct::multi_subject
             || c == construct::external_subject;
    };
    for (auto& b : d.blocks) {
      const auto& c = cons[b.id];
      if (!is_subject(b.id)) {
        if (!c.empty() && c != construct::channel)
          out_.push_back(make_violation("MisplacedBlock", "", b.id,
                                        "not an interaction construct"));
        continue;
      }
      Subject s;
      s.id = b.id;
      s.name = b.label.empty() ? b.id : b.label;
      if (c == construct::multi_subject) {
        s.kind = SubjectKind::Multi;
        s.multiplicity_default = 2;
        if (auto* m = b.property("multiplicity")) {
          int v = 0;
          auto [p, ec] = std::from_chars(m->data(), m->data() + m->size(), v);
          if (ec != std::errc{} || p != m->data() + m->size())
            out_.push_back(make_violation("BadProperty", b.id, b.id,
                                          "multiplicity=" + *m));
          s.multiplicity_default = v;
        }
      } else if (c == construct::external_subject) {
        s.kind = SubjectKind::External;
      }
      if (s.kind != SubjectKind::External)
        s.behavior = Behavior{};
      model.subjects.push_back(std::move(s));
    }

    std::map<std::string, std::set<std::string>> into, out_of;
    for (auto& [key, label] : links(d)) {
      auto& [a, b] = key;
      if (is_subject(a) && is_subject(b)) {
        add_channel(model, a, b, split_list(label), {});
      } else if (is_subject(a) && cons[b] == construct::channel) {
        into[b].insert(a);
      } else if (cons[a] == construct::channel && is_subject(b)) {
        out_of[a].insert(b);
      } else {
        out_.push_back(make_violation("UnsupportedConnection", "", a,
                                      a + "->" + b));
      }
    }
    for (auto& b : d.blocks) {
      if (cons[b.id] != construct::channel)
        continue;
      if (into[b.id].empty() || out_of[b.id].empty()) {
        out_.push_back(make_violation("DanglingChannel", "", b.id,
                                      "needs a sender and a receiver subject"));
        continue;
      }
      std::vector<std::string> msgs = split_list(b.label);
      std::map<std::string, std::vector<std::string>> payloads;
      for (auto& [k, v] : b.properties) {
        // The label may already name the message.
        if (std::find(msgs.begin(), msgs.end(), k) == msgs.end())
          msgs.push_back(k);
        payloads[k] = split_list(v);
      }
      for (auto& from : into[b.id])
        for (auto& to : out_of[b.id])
          add_channel(model, from, to, msgs, payloads);
    }
  }

  void behavior(const std::string& subject_id, const BlockDiagram& d,
                ProcessModel& model) {
    Subject* subject = nullptr;
    for (auto& s : model.subjects)
      if (s.id == subject_id)
        subject = &s;
    if (!subject || !subject->behavior) {
      out_.push_back(make_violation("DanglingReference", subject_id, "",
                                    "behavior layer for unknown or external "
                                    "subject"));
      return;
    }
    auto& beh = *subject->behavior;
    std::map<std::string, std::string> cons;
    std::map<std::string, State*> states;
    beh.states.reserve(d.blocks.size());
    for (auto& b : d.blocks) {
      auto c = construct_of(b, subject_id);
      cons[b.id] = c;
      if (c == construct::send || c == construct::receive
          || c == construct::action) {
        beh.states.push_back(make_state(b, c));
      } else if (!c.empty() && c != construct::start_flag
                 && c != construct::end_flag && c != construct::transition
                 && c != construct::timeout_transition) {
        out_.push_back(make_violation("MisplacedBlock", subject_id, b.id,
                                      "not a behavior construct"));
      }
    }
    for (auto& s : beh.states)
      states[s.id] = &s;
    auto is_activity = [&](const std::string& id) {
      return states.count(id) > 0;
    };
    auto is_edge_block = [&](const std::string& id) {
      return cons[id] == construct::transition
             || cons[id] == construct::timeout_transition;
    };
    std::map<std::string, std::vector<std::string>> edge_in, edge_out;
    for (auto& [key, label] : links(d)) {
      auto& [a, b] = key;
      if (cons[a] == construct::start_flag && is_activity(b)) {
        states[b]->is_start = true;
      } else if (is_activity(a) && cons[b] == construct::end_flag) {
        states[a]->is_end = true;
      } else if (is_activity(a) && is_activity(b)) {
        Transition t;
        t.id = a + "->" + b;
        t.from_state = a;
        t.to_state = b;
        t.guard = label;
        beh.transitions.push_back(std::move(t));
      } else if (is_activity(a) && is_edge_block(b)) {
        edge_in[b].push_back(a);
      } else if (is_edge_block(a) && is_activity(b)) {
        edge_out[a].push_back(b);
      } else {
        out_.push_back(make_violation("UnsupportedConnection", subject_id, a,
                                      a + "->" + b));
      }
    }
    for (auto& b : d.blocks) {
      if (!is_edge_block(b.id))
        continue;
      auto& ins = edge_in[b.id];
      auto& outs = edge_out[b.id];
      if (ins.empty() || outs.empty()) {
        out_.push_back(make_violation("DanglingTransition", subject_id, b.id,
                                      "needs a source and a target activity"));
        continue;
      }
      const bool timeout = cons[b.id] == construct::timeout_transition;
      std::int64_t duration = 0;
      if (timeout) {
        auto* v = b.property("duration");
        if (!v || !parse_int(*v, duration))
          out_.push_back(make_violation("BadProperty", subject_id, b.id,
                                        "duration"));
      }
      std::string guard;
      if (auto* g = b.property("guard"))
        guard = *g;
      else if (!timeout)
        guard = b.label;
      for (auto& from : ins) {
        for (auto& to : outs) {
          Transition t;
          t.id = ins.size() == 1 && outs.size() == 1
                   ? b.id
                   : b.id + ":" + from + "->" + to;
          t.from_state = from;
          t.to_state = to;
          t.kind = timeout ? TransitionKind::Timeout : TransitionKind::Normal;
          t.guard = timeout ? std::string{} : guard;
          t.timeout = duration;
          beh.transitions.push_back(std::move(t));
        }
      }
    }
    // Sole branches and outcomes need no explicit guard.
    for (auto& t : beh.transitions) {
      if (t.kind != TransitionKind::Normal || !t.guard.empty())
        continue;
      auto* s = states[t.from_state];
      if (auto* r = std::get_if<ReceiveActivity>(&s->activity);
          r && r->branches.size() == 1)
        t.guard = branch_label(r->branches.front());
      if (auto* a = std::get_if<ActionActivity>(&s->activity);
          a && a->outcomes.size() == 1)
        t.guard = a->outcomes.front();
    }
  }

private:
  static bool parse_int(const std::string& text, std::int64_t& out) {
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && p == text.data() + text.size();
  }

  void add_channel(ProcessModel& model, const std::string& from,
                   const std::string& to, const std::vector<std::string>& msgs,
                   const std::map<std::string, std::vector<std::string>>& payloads) {
    model.channels.push_back(Channel{from, to, msgs});
    for (auto& m : msgs) {
      auto& schema = messages_[m];
      if (auto it = payloads.find(m); it != payloads.end())
        schema.insert(it->second.begin(), it->second.end());
    }
  }

  State make_state(const Block& b, const std::string& c) {
    State s;
    s.id = b.id;
    s.label = b.label;
    auto prop = [&](std::string_view key) {
      auto* v = b.property(key);
      return v ? *v : std::string{};
    };
    if (c == construct::send) {
      s.activity = SendActivity{prop("to"), prop("message")};
    } else if (c == construct::receive) {
      ReceiveActivity r;
      for (auto& [k, v] : b.properties)
        if (k.rfind("from.", 0) == 0)
          for (auto& m : split_list(v))
            r.branches.push_back({k.substr(5), m});
      s.activity = std::move(r);
    } else {
      auto outcomes = split_list(prop("outcomes"));
      if (outcomes.empty())
        outcomes.push_back("done");
      s.activity = ActionActivity{std::move(outcomes)};
    }
    return s;
  }

public:
  void finish_messages(ProcessModel& model) {
    for (auto& [id, keys] : messages_)
      model.messages.push_back(MessageType{id, id, {keys.begin(), keys.end()}});
  }

private:
  const NotationDefinition& notation_;
  std::vector<Violation> out_;
  std::map<std::string, std::set<std::string>> messages_;
};

} // namespace

Checked<ProcessModel> to_semantic_model(const LayeredDiagram& diagram,
                                        const NotationDefinition& notation,
                                        std::string model_id,
                                        std::string model_name) {
  std::vector<Violation> conformance;
  try {
    conformance = conformance_check(diagram, notation);
  } catch (const Error& e) {
    conformance.push_back(make_violation(e.code(), "", e.details(), e.what()));
  }
  if (!conformance.empty())
    return conformance;
  Translator tr{notation};
  tr.check_direction(diagram.interaction, "");
  for (auto& [subject, layer] : diagram.behaviors)
    tr.check_direction(layer, subject);
  if (!tr.violations().empty()) {
    normalize(tr.violations());
    return tr.violations();
  }
  ProcessModel model;
  model.id = std::move(model_id);
  model.name = model_name.empty() ? model.id : std::move(model_name);
  tr.interaction(diagram.interaction, model);
  for (auto& [subject, layer] : diagram.behaviors)
    tr.behavior(subject, layer, model);
  tr.finish_messages(model);
  if (!tr.violations().empty()) {
    normalize(tr.violations());
    return tr.violations();
  }
  return build_model(std::move(model));
}

Checked<ProcessModel> to_semantic_model(const BlockDiagram& interaction,
                                        const NotationDefinition& notation,
                                        std::string model_id,
                                        std::string model_name) {
  return to_semantic_model(LayeredDiagram{interaction, {}}, notation,
                           std::move(model_id), std::move(model_name));
}

} // namespace sbpm
