#include "sbpm/explore.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace sbpm {

namespace {

constexpr int none = -1;

struct CompiledState {
  std::string id;
  bool is_end = false;
  ActivityKind kind = ActivityKind::Action;
  int message = none;
  int target_subject = none;
  int send_next = none;
  std::vector<std::pair<int, int>> branches; // (source subject, message)
  std::vector<int> branch_next;
  std::vector<int> outcome_next;
  int timeout_next = none;
};

struct CompiledAgent {
  std::string id;
  int subject = none;
  const std::vector<CompiledState>* states = nullptr;
  int start = none;
};

using Entry = std::pair<std::uint16_t, std::uint16_t>; // (sender agent, msg)

struct Global {
  std::vector<std::uint16_t> loc;
  std::vector<std::vector<Entry>> mailbox;
};

struct Node {
  Global state;
  int parent = none;
  Move via;
  std::size_t depth = 0;
};

class Explorer {
public:
  Explorer(const ProcessModel& model, const ExplorationOptions& options)
    : model_(model) {
    compile(options);
  }

  ExplorationResult run(const ExplorationBounds& bounds) {
    ExplorationResult result;
    for (auto& s : model_.subjects)
      if (s.kind != SubjectKind::External)
        result.end_reachable[s.id] = false;

    std::vector<Node> nodes;
    std::unordered_map<std::string, std::size_t> index;
    std::vector<std::pair<std::size_t, std::size_t>> edges;

    Global init;
    for (auto& a : agents_) {
      init.loc.push_back(static_cast<std::uint16_t>(a.start));
      init.mailbox.emplace_back();
    }
    index.emplace(key(init), 0);
    note_ends(init, result);
    nodes.push_back({std::move(init), none, {}, 0});

    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const Global current = nodes[i].state;
      const auto depth = nodes[i].depth;
      auto moves = enabled(current);
      if (moves.empty()) {
        if (all_at_end(current)) {
          result.terminal_statuses.insert(InstanceStatus::Completed);
        } else {
          result.terminal_statuses.insert(InstanceStatus::Deadlocked);
          result.deadlocks.push_back({view(current), witness(nodes, i)});
        }
        continue;
      }
      if (depth >= bounds.max_depth) {
        result.complete = false;
        continue;
      }
      for (auto& m : moves) {
        auto next = apply(current, m);
        if (overflows(next, bounds.max_mailbox)) {
          result.complete = false;
          continue;
        }
        auto k = key(next);
        if (auto it = index.find(k); it != index.end()) {
          edges.emplace_back(i, it->second);
          continue;
        }
        if (nodes.size() >= bounds.max_states) {
          result.complete = false;
          continue;
        }
        auto id = nodes.size();
        index.emplace(std::move(k), id);
        edges.emplace_back(i, id);
        note_ends(next, result);
        nodes.push_back({std::move(next), static_cast<int>(i), m, depth + 1});
      }
    }
    result.states = nodes.size();
    result.transitions = edges.size();
    result.may_diverge = has_cycle(nodes.size(), edges);
    if (result.may_diverge)
      result.terminal_statuses.insert(InstanceStatus::StepLimit);
    return result;
  }

private:
  void compile(const ExplorationOptions& options) {
    for (auto& m : model_.messages)
      message_index_[m.id] = static_cast<int>(message_index_.size());
    for (std::size_t i = 0; i < model_.subjects.size(); ++i)
      subject_index_[model_.subjects[i].id] = static_cast<int>(i);
    compiled_.resize(model_.subjects.size());
    for (std::size_t si = 0; si < model_.subjects.size(); ++si) {
      auto& s = model_.subjects[si];
      if (s.kind == SubjectKind::External)
        continue;
      auto& beh = *s.behavior;
      auto& states = compiled_[si];
      std::map<std::string, int> local;
      for (std::size_t k = 0; k < beh.states.size(); ++k)
        local[beh.states[k].id] = static_cast<int>(k);
      for (auto& st : beh.states) {
        CompiledState c;
        c.id = st.id;
        c.is_end = st.is_end;
        c.kind = st.kind();
        auto next_for = [&](std::string_view guard) {
          for (auto& t : beh.transitions)
            if (t.from_state == st.id && t.kind == TransitionKind::Normal
                && t.guard == guard)
              return local.at(t.to_state);
          return none;
        };
        for (auto& t : beh.transitions)
          if (t.from_state == st.id && t.kind == TransitionKind::Timeout)
            c.timeout_next = local.at(t.to_state);
        if (auto* send = std::get_if<SendActivity>(&st.activity)) {
          c.message = message_index_.at(send->message_id);
          c.target_subject = subject_index_.at(send->target_subject);
          c.send_next = next_for("");
        } else if (auto* recv = std::get_if<ReceiveActivity>(&st.activity)) {
          for (auto& br : recv->branches) {
            c.branches.emplace_back(subject_index_.at(br.source_subject),
                                    message_index_.at(br.message_id));
            c.branch_next.push_back(next_for(branch_label(br)));
          }
        } else {
          for (auto& o : std::get<ActionActivity>(st.activity).outcomes)
            c.outcome_next.push_back(next_for(o));
        }
        states.push_back(std::move(c));
      }
    }
    for (std::size_t si = 0; si < model_.subjects.size(); ++si) {
      auto& s = model_.subjects[si];
      if (s.kind == SubjectKind::External)
        continue;
      int count = 1;
      if (s.kind == SubjectKind::Multi) {
        auto it = options.multiplicities.find(s.id);
        count = it != options.multiplicities.end() ? it->second
                                                   : s.multiplicity_default;
      }
      const auto first = agents_.size();
      auto start = static_cast<int>(
        std::find_if(s.behavior->states.begin(), s.behavior->states.end(),
                     [](const State& x) { return x.is_start; })
        - s.behavior->states.begin());
      for (int r = 0; r < count; ++r)
        agents_.push_back({s.kind == SubjectKind::Multi
                             ? s.id + "#" + std::to_string(r)
                             : s.id,
                           static_cast<int>(si), &compiled_[si], start});
      if (s.kind == SubjectKind::Multi && count > 1 && options.symmetry_reduction)
        groups_.emplace_back(first, agents_.size());
    }
    if (agents_.size() > std::numeric_limits<std::uint16_t>::max())
      throw Error("BoundsExceeded", "too many agents to explore");
    std::size_t perms = 1;
    for (auto& [b, e] : groups_)
      for (std::size_t k = 2; k <= e - b; ++k)
        perms *= k;
    if (perms > 720)
      groups_.clear();
  }

  const CompiledState& at(const Global& g, std::size_t agent) const {
    return (*agents_[agent].states)[g.loc[agent]];
  }

  int receivable(const Global& g, std::size_t agent) const {
    auto& st = at(g, agent);
    std::vector<bool> seen(agents_.size(), false);
    auto& mb = g.mailbox[agent];
    for (std::size_t i = 0; i < mb.size(); ++i) {
      auto [sender, msg] = mb[i];
      if (seen[sender])
        continue;
      seen[sender] = true;
      for (auto& [src, m] : st.branches)
        if (src == agents_[sender].subject && m == msg)
          return static_cast<int>(i);
    }
    return none;
  }

  std::vector<Move> enabled(const Global& g) const {
    std::vector<Move> out;
    for (std::size_t a = 0; a < agents_.size(); ++a) {
      auto& st = at(g, a);
      if (st.is_end)
        continue;
      Move m{a, agents_[a].id, st.id, MoveKind::Send, 0};
      switch (st.kind) {
        case ActivityKind::Send:
          out.push_back(m);
          break;
        case ActivityKind::Action:
          for (std::size_t o = 0; o < st.outcome_next.size(); ++o) {
            m.kind = MoveKind::Action;
            m.outcome = o;
            out.push_back(m);
          }
          break;
        case ActivityKind::Receive:
          if (receivable(g, a) != none) {
            m.kind = MoveKind::Receive;
            out.push_back(m);
          }
          if (st.timeout_next != none) {
            m.kind = MoveKind::Timeout;
            out.push_back(m);
          }
          break;
      }
    }
    return out;
  }

  Global apply(const Global& g, const Move& m) const {
    Global next = g;
    auto& st = at(g, m.agent);
    auto a16 = static_cast<std::uint16_t>(m.agent);
    int to = none;
    switch (m.kind) {
      case MoveKind::Send:
        for (std::size_t t = 0; t < agents_.size(); ++t)
          if (agents_[t].subject == st.target_subject)
            next.mailbox[t].emplace_back(
              a16, static_cast<std::uint16_t>(st.message));
        to = st.send_next;
        break;
      case MoveKind::Receive: {
        auto idx = receivable(g, m.agent);
        auto [sender, msg] = g.mailbox[m.agent][static_cast<std::size_t>(idx)];
        auto& mb = next.mailbox[m.agent];
        mb.erase(mb.begin() + idx);
        for (std::size_t b = 0; b < st.branches.size(); ++b)
          if (st.branches[b].first == agents_[sender].subject
              && st.branches[b].second == msg) {
            to = st.branch_next[b];
            break;
          }
        break;
      }
      case MoveKind::Action:
        to = st.outcome_next[m.outcome];
        break;
      case MoveKind::Timeout:
        to = st.timeout_next;
        break;
      case MoveKind::Finish:
        break;
    }
    next.loc[m.agent] = static_cast<std::uint16_t>(to);
    return next;
  }

  static bool overflows(const Global& g, std::size_t cap) {
    for (auto& mb : g.mailbox)
      if (mb.size() > cap)
        return true;
    return false;
  }

  bool all_at_end(const Global& g) const {
    for (std::size_t a = 0; a < agents_.size(); ++a)
      if (!at(g, a).is_end)
        return false;
    return true;
  }

  void note_ends(const Global& g, ExplorationResult& r) const {
    for (std::size_t a = 0; a < agents_.size(); ++a)
      if (at(g, a).is_end)
        r.end_reachable[model_.subjects[agents_[a].subject].id] = true;
  }

  // Encoding of `g` with agent slot p holding agent perm[p].
  std::string encode(const Global& g, const std::vector<std::size_t>& perm,
                     const std::vector<std::size_t>& inverse) const {
    std::string out;
    auto put = [&](std::uint16_t v) {
      out += static_cast<char>(v & 0xff);
      out += static_cast<char>(v >> 8);
    };
    for (auto p : perm) {
      put(g.loc[p]);
      put(static_cast<std::uint16_t>(g.mailbox[p].size()));
      for (auto [sender, msg] : g.mailbox[p]) {
        put(static_cast<std::uint16_t>(inverse[sender]));
        put(msg);
      }
    }
    return out;
  }

  // Canonical form: minimum encoding over all replica permutations.
  std::string key(const Global& g) const {
    std::vector<std::size_t> perm(agents_.size());
    std::iota(perm.begin(), perm.end(), 0);
    auto inverse_of = [](const std::vector<std::size_t>& p) {
      std::vector<std::size_t> inv(p.size());
      for (std::size_t i = 0; i < p.size(); ++i)
        inv[p[i]] = i;
      return inv;
    };
    if (groups_.empty())
      return encode(g, perm, perm);
    std::string best;
    bool first = true;
    auto visit = [&](auto&& self, std::size_t group) -> void {
      if (group == groups_.size()) {
        auto e = encode(g, perm, inverse_of(perm));
        if (first || e < best) {
          best = std::move(e);
          first = false;
        }
        return;
      }
      auto [b, e] = groups_[group];
      auto begin = perm.begin() + static_cast<std::ptrdiff_t>(b);
      auto end = perm.begin() + static_cast<std::ptrdiff_t>(e);
      std::sort(begin, end);
      do {
        self(self, group + 1);
      } while (std::next_permutation(begin, end));
    };
    visit(visit, 0);
    return best;
  }

  GlobalStateView view(const Global& g) const {
    GlobalStateView out;
    for (std::size_t a = 0; a < agents_.size(); ++a) {
      AgentView v{agents_[a].id, at(g, a).id, {}};
      for (auto [sender, msg] : g.mailbox[a])
        v.mailbox.push_back({agents_[sender].id, model_.messages[msg].id});
      out.push_back(std::move(v));
    }
    return out;
  }

  static std::vector<Move> witness(const std::vector<Node>& nodes,
                                   std::size_t i) {
    std::vector<Move> path;
    for (int n = static_cast<int>(i); nodes[n].parent != none;
         n = nodes[n].parent)
      path.push_back(nodes[n].via);
    std::reverse(path.begin(), path.end());
    return path;
  }

  static bool
  has_cycle(std::size_t n,
            const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    std::vector<std::size_t> indegree(n, 0);
    std::vector<std::vector<std::size_t>> adj(n);
    for (auto [from, to] : edges) {
      adj[from].push_back(to);
      ++indegree[to];
    }
    std::deque<std::size_t> ready;
    for (std::size_t i = 0; i < n; ++i)
      if (indegree[i] == 0)
        ready.push_back(i);
    std::size_t removed = 0;
    while (!ready.empty()) {
      auto v = ready.front();
      ready.pop_front();
      ++removed;
      for (auto w : adj[v])
        if (--indegree[w] == 0)
          ready.push_back(w);
    }
    return removed != n;
  }

  const ProcessModel& model_;
  std::map<std::string, int> message_index_;
  std::map<std::string, int> subject_index_;
  std::vector<std::vector<CompiledState>> compiled_;
  std::vector<CompiledAgent> agents_;
  std::vector<std::pair<std::size_t, std::size_t>> groups_;
};

void require_valid(const ProcessModel& model) {
  auto problems = well_formed(model);
  if (problems.empty())
    problems = interface_consistency(model);
  if (has_errors(problems))
    throw Error("ModelInvalid", "model '" + model.id
                                  + "' must pass well_formed and "
                                    "interface_consistency before exploration");
}

} // namespace

ExplorationResult state_space(const ProcessModel& model,
                              const ExplorationBounds& bounds,
                              const ExplorationOptions& options) {
  require_valid(model);
  if (bounds.max_states < 1 || bounds.max_mailbox < 1 || bounds.max_depth < 1)
    throw Error("BadBounds", "exploration bounds must all be at least 1");
  for (auto& [sid, k] : options.multiplicities) {
    auto* s = model.find_subject(sid);
    if (!s || s->kind != SubjectKind::Multi || k < 1)
      throw Error("BadMultiplicity", "bad multiplicity for '" + sid + "'");
  }
  return Explorer{model, options}.run(bounds);
}

std::vector<DeadlockReport> find_deadlocks(const ProcessModel& model,
                                           const ExplorationBounds& bounds,
                                           const ExplorationOptions& options) {
  return state_space(model, bounds, options).deadlocks;
}

ReplayResult replay(const ProcessModel& model, const std::vector<Move>& witness,
                    const std::map<std::string, int>& multiplicities) {
  SchedulerConfig config;
  config.multiplicities = multiplicities;
  config.max_steps = std::numeric_limits<std::uint64_t>::max();
  auto inst = ProcessInstance::instantiate(model, config);
  for (auto& m : witness)
    inst.apply(m);
  for (std::size_t a = 0; a < inst.agents().size(); ++a) {
    auto& agent = inst.agents()[a];
    if (agent.finished)
      continue;
    auto& st = *model.find_subject(agent.subject_id)
                  ->behavior->find_state(agent.current_state);
    if (st.is_end)
      inst.apply({a, agent.id, agent.current_state, MoveKind::Finish, 0});
  }
  ReplayResult out;
  out.state = inst.snapshot();
  bool done = std::all_of(inst.agents().begin(), inst.agents().end(),
                          [](const AgentInstance& x) { return x.finished; });
  if (done)
    out.status = InstanceStatus::Completed;
  else if (inst.detect_deadlock())
    out.status = InstanceStatus::Deadlocked;
  out.trace = inst.trace();
  return out;
}

std::string describe(const DeadlockReport& report) {
  std::string out = "deadlock: " + to_string(report.state) + "\n";
  if (report.witness.empty())
    out += "  (initial state)\n";
  for (std::size_t i = 0; i < report.witness.size(); ++i)
    out += "  " + std::to_string(i + 1) + ". " + to_string(report.witness[i])
           + "\n";
  return out;
}

} // namespace sbpm
