#include "generators.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace sbpm::testing {

namespace {

int pick(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

bool chance(Rng& rng, double p) {
  return std::bernoulli_distribution(p)(rng);
}

} // namespace

ModelShape small_shape() {
  ModelShape s;
  s.max_subjects = 3;
  s.max_states = 5;
  s.messages = 2;
  s.multi_share = 0;
  s.external_share = 0.1;
  s.timeout_share = 0.2;
  s.max_multiplicity = 1;
  return s;
}

ProcessModel random_model(Rng& rng, const ModelShape& shape) {
  const auto awkward = [&](std::string base) {
    if (!shape.awkward_text)
      return base;
    static const char* extras[] = {" & co", " <x>", " \"q\"", "\ttab",
                                   " 'a'", "\nline", " ü", ""};
    return base + extras[pick(rng, 0, 7)];
  };

  ProcessModel m;
  m.id = "gen" + std::to_string(pick(rng, 0, 999999));
  m.name = awkward("Generated");
  for (int k = 0; k < shape.messages; ++k) {
    MessageType t{"m" + std::to_string(k), awkward("msg"), {}};
    for (int j = pick(rng, 0, 2); j > 0; --j)
      t.payload_schema.push_back("k" + std::to_string(j));
    m.messages.push_back(std::move(t));
  }

  const int n = pick(rng, 1, shape.max_subjects);
  for (int i = 0; i < n; ++i) {
    Subject s;
    s.id = "S" + std::to_string(i);
    s.name = awkward("Subject " + std::to_string(i));
    if (i > 0 && chance(rng, shape.external_share)) {
      s.kind = SubjectKind::External;
    } else if (chance(rng, shape.multi_share)) {
      s.kind = SubjectKind::Multi;
      s.multiplicity_default = pick(rng, 1, shape.max_multiplicity);
    }
    m.subjects.push_back(std::move(s));
  }

  std::set<std::tuple<std::string, std::string, std::string>> triples;
  auto other = [&](int self) { return (self + pick(rng, 1, n - 1)) % n; };
  auto message = [&] { return "m" + std::to_string(pick(rng, 0, shape.messages - 1)); };

  for (int i = 0; i < n; ++i) {
    auto& s = m.subjects[i];
    if (s.kind == SubjectKind::External)
      continue;
    Behavior b;
    const int ns = pick(rng, 2, shape.max_states);
    auto state_id = [](int k) { return "q" + std::to_string(k); };
    auto target = [&](int from) {
      return state_id(from + 1 < ns && chance(rng, 0.8) ? pick(rng, from + 1, ns - 1)
                                                         : pick(rng, 0, ns - 1));
    };
    int next_t = 0;
    auto add = [&](int from, std::string guard, TransitionKind kind = TransitionKind::Normal,
                   std::int64_t timeout = 0) {
      b.transitions.push_back({"t" + std::to_string(next_t++), state_id(from),
                               target(from), kind, std::move(guard), timeout});
    };
    for (int k = 0; k < ns; ++k) {
      State st;
      st.id = state_id(k);
      st.label = chance(rng, 0.5) ? awkward("step") : "";
      st.is_start = k == 0;
      st.is_end = k == ns - 1 || (k > 0 && chance(rng, 0.1));
      if (st.is_end) {
        b.states.push_back(std::move(st));
        continue;
      }
      int kind = n == 1 ? 2 : pick(rng, 0, 2);
      if (kind == 0) {
        auto to = m.subjects[other(i)].id;
        auto msg = message();
        st.activity = SendActivity{to, msg};
        triples.emplace(s.id, to, msg);
        add(k, "");
      } else if (kind == 1) {
        ReceiveActivity r;
        std::set<std::pair<std::string, std::string>> seen;
        for (int j = pick(rng, 1, 2); j > 0; --j) {
          auto from = m.subjects[other(i)].id;
          auto msg = message();
          if (!seen.emplace(from, msg).second)
            continue;
          r.branches.push_back({from, msg});
          triples.emplace(from, s.id, msg);
        }
        for (auto& br : r.branches)
          add(k, branch_label(br));
        if (chance(rng, shape.timeout_share))
          add(k, "", TransitionKind::Timeout, pick(rng, 0, 20));
        st.activity = std::move(r);
      } else {
        ActionActivity a{{"ok"}};
        if (chance(rng, 0.4))
          a.outcomes.push_back("alt");
        for (auto& o : a.outcomes)
          add(k, o);
        st.activity = std::move(a);
      }
      b.states.push_back(std::move(st));
    }
    s.behavior = std::move(b);
  }
  for (auto& [from, to, msg] : triples)
    m.channels.push_back({from, to, {msg}});

  auto built = build_model(std::move(m));
  if (!built.ok())
    throw std::logic_error("generator produced an unbuildable model: "
                           + to_string(built.violations().front()));
  auto model = std::move(built).value();
  auto problems = well_formed(model);
  auto iface = interface_consistency(model);
  problems.insert(problems.end(), iface.begin(), iface.end());
  if (has_errors(problems))
    for (auto& v : problems)
      if (v.severity == Severity::Error)
        throw std::logic_error("generator produced an invalid model: "
                               + to_string(v));
  return model;
}

// -- diagrams ------------------------------------------------------------------

namespace {

struct Chain {
  FlowAxis axis;
  double gap;
  double along = 0;
  double cross = 0;

  // Places `b` after the previous block, jittered across the axis while
  // keeping a shared edge.
  Block next(Rng& rng, Block b) {
    double jitter = pick(rng, -10, 10);
    if (axis == FlowAxis::TopDown) {
      b.position = {cross + jitter, along};
      along += b.height + gap;
    } else {
      b.position = {along, cross + jitter};
      along += b.width + gap;
    }
    return b;
  }
};

Block make(std::string id, std::string kind, double w, double h,
           std::string label = {}, std::vector<Property> props = {}) {
  Block b;
  b.id = std::move(id);
  b.kind = std::move(kind);
  b.width = w;
  b.height = h;
  b.label = std::move(label);
  b.properties = std::move(props);
  return b;
}

void arrow(BlockDiagram& d, std::string id, std::string from, std::string to,
           std::string label = {}) {
  d.arrows.push_back({std::move(id), std::move(from), std::move(to),
                      std::move(label), {}});
}

void route(BlockDiagram& d) {
  for (auto& a : d.arrows)
    a.waypoints = route_arrow(d, a.from_block, a.to_block).waypoints;
  fit_stage(d);
}

} // namespace

LayeredDiagram random_diagram(Rng& rng) {
  LayeredDiagram out;
  FlowConvention flow;
  flow.axis = chance(rng, 0.5) ? FlowAxis::TopDown : FlowAxis::LeftRight;
  flow.gap = chance(rng, 0.5) ? 0 : 4;
  const bool td = flow.axis == FlowAxis::TopDown;

  auto& sid = out.interaction;
  sid.flow = flow;
  const int n = pick(rng, 2, 4);
  const bool external = chance(rng, 0.3);
  std::map<int, std::vector<std::pair<std::string, std::string>>> senders;
  for (int i = 0; i < n; ++i) {
    auto id = "S" + std::to_string(i);
    Block b;
    if (chance(rng, 0.25)) {
      std::vector<Property> props;
      if (chance(rng, 0.5))
        props.emplace_back("multiplicity", std::to_string(pick(rng, 1, 3)));
      b = make(id, "multi-subject", 120, 60, "Team " + id, std::move(props));
    } else {
      b = make(id, "subject", 120, 60, "Subject " + id);
    }
    b.position = td ? Point{300.0 * i, 0} : Point{0, 300.0 * i};
    sid.blocks.push_back(std::move(b));
  }
  for (int i = 0; i < n; ++i) {
    int j = (i + 1) % n;
    auto from = "S" + std::to_string(i);
    auto to = "S" + std::to_string(j);
    auto msg = "m" + std::to_string(i);
    senders[j].emplace_back(from, msg);
    if (chance(rng, 0.5)) {
      arrow(sid, "a" + std::to_string(i), from, to, msg);
    } else {
      auto cid = "C" + std::to_string(i);
      std::vector<Property> props;
      if (chance(rng, 0.5))
        props.emplace_back(msg, "k1,k2");
      auto c = make(cid, "channel", 80, 40, msg, std::move(props));
      c.position = td ? Point{300.0 * i, 60 + flow.gap}
                      : Point{120 + flow.gap, 300.0 * i};
      sid.blocks.push_back(std::move(c));
      arrow(sid, "a" + std::to_string(i), cid, to);
    }
  }
  if (external) {
    auto x = make("X", "external-subject", 120, 60, "Outside");
    x.position = {-1000, -1000};
    sid.blocks.push_back(std::move(x));
    arrow(sid, "ax", "X", "S0", "mx");
    senders[0].emplace_back("X", "mx");
  }
  route(sid);

  for (int i = 0; i < n; ++i) {
    BlockDiagram d;
    d.flow = flow;
    Chain chain{flow.axis, flow.gap};
    std::vector<Block> seq;
    // Flags are thin along the flow axis and wide enough across it to keep
    // a shared edge under jitter.
    const double fw = td ? 60 : 20, fh = td ? 20 : 40;
    seq.push_back(make("st", "start", fw, fh));
    seq.push_back(make("snd", "send", 120, 40, "send",
                       {{"to", "S" + std::to_string((i + 1) % n)},
                        {"message", "m" + std::to_string(i)}}));
    std::vector<std::string> receives;
    for (auto& [from, msg] : senders[i]) {
      auto id = "rcv_" + from;
      receives.push_back(id);
      seq.push_back(make(id, "receive", 120, 40, "wait", {{"from." + from, msg}}));
    }
    bool retry = false;
    if (chance(rng, 0.5)) {
      retry = chance(rng, 0.5);
      seq.push_back(make("act", "action", 120, 40, "work",
                         retry ? std::vector<Property>{{"outcomes", "ok,retry"}}
                               : std::vector<Property>{}));
      if (retry)
        seq.push_back(make("tr", "transition", 60, 20, "", {{"guard", "ok"}}));
      seq.push_back(make("fin", "action", 120, 40, "finish"));
    }
    seq.push_back(make("en", "end", fw, fh));
    for (auto& b : seq)
      d.blocks.push_back(chain.next(rng, std::move(b)));
    if (retry)
      arrow(d, "back", "act", "snd", "retry");
    // A receive right before the end flag is itself an end state and may
    // not have a timeout.
    if (!receives.empty() && d.blocks[d.blocks.size() - 2].id == receives.back())
      receives.pop_back();
    if (!receives.empty() && chance(rng, 0.3)) {
      auto& r = receives[pick(rng, 0, static_cast<int>(receives.size()) - 1)];
      auto t = make("to", "timeout-transition", 60, 20, "",
                    {{"duration", std::to_string(pick(rng, 0, 20))}});
      t.position = td ? Point{600, 0} : Point{0, 600};
      d.blocks.push_back(std::move(t));
      arrow(d, "into", r, "to");
      arrow(d, "outof", "to", "snd");
    }
    route(d);
    out.behaviors["S" + std::to_string(i)] = std::move(d);
  }
  return out;
}

BlockDiagram spread_out(const BlockDiagram& diagram) {
  BlockDiagram d = diagram;
  int n = 0;
  for (auto& c : infer_connections(diagram))
    if (c.origin == ConnectionOrigin::Implicit)
      d.arrows.push_back({"docked" + std::to_string(n++), c.from_block,
                          c.to_block, "", {}});
  for (std::size_t k = 0; k < d.blocks.size(); ++k)
    d.blocks[k].position = {5000.0 + 1000.0 * static_cast<double>(k),
                            5000.0 + 1000.0 * static_cast<double>(k)};
  route(d);
  return d;
}

LayeredDiagram spread_out(const LayeredDiagram& diagram) {
  LayeredDiagram out;
  out.interaction = spread_out(diagram.interaction);
  for (auto& [s, d] : diagram.behaviors)
    out.behaviors[s] = spread_out(d);
  return out;
}

// -- trace properties ----------------------------------------------------------

namespace {

struct SentCopy {
  std::string sender;
  std::string receiver;
  std::uint64_t seq;
};

std::map<std::uint64_t, SentCopy> deliveries(const Trace& trace) {
  std::map<std::uint64_t, SentCopy> out;
  for (auto& e : trace.events)
    if (e.kind == EventKind::Sent)
      for (auto& d : e.deliveries)
        out[d.uid] = {e.agent, d.to_agent, e.seq};
  return out;
}

} // namespace

bool per_pair_fifo(const Trace& trace) {
  auto sent = deliveries(trace);
  std::map<std::pair<std::string, std::string>, std::uint64_t> last;
  for (auto& e : trace.events) {
    if (e.kind != EventKind::Received)
      continue;
    auto it = sent.find(e.uid);
    if (it == sent.end() || it->second.receiver != e.agent)
      return false;
    auto key = std::make_pair(it->second.sender, e.agent);
    if (auto l = last.find(key); l != last.end() && l->second >= e.uid)
      return false;
    last[key] = e.uid;
  }
  return true;
}

bool fan_out_conserved(const Trace& trace, const ProcessInstance& inst) {
  std::map<std::string, std::set<std::string>> agents_of;
  std::set<std::string> agent_ids;
  for (auto& a : inst.agents()) {
    agents_of[a.subject_id].insert(a.id);
    agent_ids.insert(a.id);
  }
  for (auto& e : trace.events) {
    if (e.kind != EventKind::Sent || !agent_ids.count(e.agent))
      continue;
    std::set<std::string> got;
    for (auto& d : e.deliveries)
      got.insert(d.to_agent);
    if (got.size() != e.deliveries.size() || got != agents_of[e.peer])
      return false;
  }
  return true;
}

bool no_lost_messages(const Trace& trace, const ProcessInstance& inst) {
  auto sent = deliveries(trace);
  std::set<std::uint64_t> consumed;
  for (auto& e : trace.events)
    if (e.kind == EventKind::Received
        && (!sent.count(e.uid) || !consumed.insert(e.uid).second))
      return false;
  std::set<std::uint64_t> residual;
  for (auto& a : inst.agents())
    for (auto& msg : a.mailbox)
      if (!residual.insert(msg.uid).second)
        return false;
  std::set<std::uint64_t> expected;
  for (auto& [uid, _] : sent)
    if (!consumed.count(uid))
      expected.insert(uid);
  return residual == expected;
}

} // namespace sbpm::testing
