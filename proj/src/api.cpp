#include "sbpm/api.hpp"

namespace sbpm::api {

std::vector<Violation> validate(const ModelDocument& doc,
                                const NotationDefinition& notation) {
  auto out = well_formed(doc.model);
  auto iface = interface_consistency(doc.model);
  out.insert(out.end(), iface.begin(), iface.end());
  if (doc.layout) {
    try {
      auto conf = conformance_check(*doc.layout, notation);
      out.insert(out.end(), conf.begin(), conf.end());
    } catch (const Error& e) {
      out.push_back(make_violation(e.code(), "", e.details(), e.what()));
    }
  }
  normalize(out);
  return out;
}

json to_json(const Violation& v) {
  return {{"code", v.code},
          {"severity", std::string{to_string(v.severity)}},
          {"subject", v.subject},
          {"element", v.element},
          {"detail", v.detail}};
}

json to_json(const std::vector<Violation>& vs) {
  json out = json::array();
  for (auto& v : vs)
    out.push_back(to_json(v));
  return out;
}

json validation_json(const std::vector<Violation>& vs) {
  return {{"ok", !has_errors(vs)}, {"violations", to_json(vs)}};
}

json to_json(const Move& m) {
  json out = {{"agent", m.agent_id},
              {"from_state", m.from_state},
              {"kind", std::string{to_string(m.kind)}}};
  if (m.kind == MoveKind::Action)
    out["outcome"] = m.outcome;
  return out;
}

json to_json(const GlobalStateView& view) {
  json out = json::array();
  for (auto& a : view) {
    json mb = json::array();
    for (auto& e : a.mailbox)
      mb.push_back({{"sender", e.sender}, {"message", e.message_id}});
    out.push_back({{"agent", a.agent}, {"state", a.state}, {"mailbox", mb}});
  }
  return out;
}

json to_json(const ExplorationResult& r) {
  json statuses = json::array();
  for (auto s : r.terminal_statuses)
    statuses.push_back(std::string{to_string(s)});
  json reach = json::object();
  for (auto& [s, ok] : r.end_reachable)
    reach[s] = ok;
  json deadlocks = json::array();
  for (auto& d : r.deadlocks) {
    json witness = json::array();
    for (auto& m : d.witness)
      witness.push_back(to_json(m));
    deadlocks.push_back({{"state", to_json(d.state)}, {"witness", witness}});
  }
  return {{"states", r.states},
          {"transitions", r.transitions},
          {"complete", r.complete},
          {"may_diverge", r.may_diverge},
          {"terminal_statuses", statuses},
          {"end_reachable", reach},
          {"deadlocks", deadlocks}};
}

json to_json(const TraceEvent& e) {
  json out = {{"seq", e.seq},
              {"time", e.time},
              {"agent", e.agent},
              {"kind", std::string{to_string(e.kind)}}};
  auto maybe = [&](const char* key, const std::string& v) {
    if (!v.empty())
      out[key] = v;
  };
  maybe("message", e.message_id);
  maybe("peer", e.peer);
  maybe("outcome", e.outcome);
  maybe("from", e.from_state);
  maybe("to", e.to_state);
  if (e.uid != 0)
    out["uid"] = e.uid;
  if (!e.deliveries.empty()) {
    json ds = json::array();
    for (auto& d : e.deliveries)
      ds.push_back({{"uid", d.uid}, {"to", d.to_agent}});
    out["deliveries"] = ds;
  }
  if (!e.payload.empty()) {
    json p = json::object();
    for (auto& [k, v] : e.payload)
      p[k] = v;
    out["payload"] = p;
  }
  return out;
}

json run_json(const ProcessInstance& inst) {
  json events = json::array();
  for (auto& e : inst.trace().events)
    events.push_back(to_json(e));
  return {{"status", std::string{to_string(inst.status())}},
          {"clock", inst.clock()},
          {"steps", inst.steps()},
          {"events", events}};
}

json to_json(const AnomalyReport& report, const std::vector<Lint>& lints) {
  json ls = json::array();
  for (auto& l : lints)
    ls.push_back({{"code", l.code}, {"kinds", l.kinds}, {"detail", l.detail}});
  return {{"ok", report.empty()},
          {"anomalies",
           {{"deficits", report.deficits},
            {"redundancies", report.redundancies},
            {"overloads", report.overloads},
            {"excesses", report.excesses}}},
          {"lints", ls}};
}

json error_json(const std::string& code, const std::string& message,
                const std::string& details) {
  return {{"code", code}, {"message", message}, {"details", details}};
}

namespace {

[[noreturn]] void bad(const std::string& why) {
  throw Error("BadRequest", why);
}

template <class T>
void read_number(const json& body, const char* key, T& out) {
  auto it = body.find(key);
  if (it == body.end())
    return;
  if (!it->is_number_unsigned())
    bad(std::string{"\""} + key + "\" must be a non-negative integer");
  out = it->get<T>();
}

std::map<std::string, int> read_multiplicities(const json& body) {
  std::map<std::string, int> out;
  auto it = body.find("multiplicities");
  if (it == body.end())
    return out;
  if (!it->is_object())
    bad("\"multiplicities\" must be an object");
  for (auto& [k, v] : it->items()) {
    if (!v.is_number_integer())
      bad("multiplicity of '" + k + "' must be an integer");
    out[k] = v.get<int>();
  }
  return out;
}

} // namespace

void read_exploration(const json& body, ExplorationBounds& bounds,
                      ExplorationOptions& options) {
  if (body.is_null())
    return;
  if (!body.is_object())
    bad("body must be a JSON object");
  read_number(body, "max_states", bounds.max_states);
  read_number(body, "max_mailbox", bounds.max_mailbox);
  read_number(body, "max_depth", bounds.max_depth);
  options.multiplicities = read_multiplicities(body);
  if (auto it = body.find("symmetry_reduction"); it != body.end()) {
    if (!it->is_boolean())
      bad("\"symmetry_reduction\" must be a boolean");
    options.symmetry_reduction = it->get<bool>();
  }
}

SchedulerConfig read_scheduler(const json& body) {
  SchedulerConfig config;
  config.policy = SchedulingPolicy::SeededRandom;
  if (body.is_null())
    return config;
  if (!body.is_object())
    bad("body must be a JSON object");
  if (auto it = body.find("policy"); it != body.end()) {
    auto p = it->is_string() ? parse_policy(it->get<std::string>())
                             : std::nullopt;
    if (!p)
      bad("\"policy\" must be round-robin or seeded-random");
    config.policy = *p;
  }
  read_number(body, "seed", config.seed);
  read_number(body, "max_steps", config.max_steps);
  config.multiplicities = read_multiplicities(body);
  return config;
}

std::string_view to_string(SchedulingPolicy p) {
  return p == SchedulingPolicy::RoundRobin ? "round-robin" : "seeded-random";
}

std::optional<SchedulingPolicy> parse_policy(std::string_view text) {
  if (text == "round-robin")
    return SchedulingPolicy::RoundRobin;
  if (text == "seeded-random")
    return SchedulingPolicy::SeededRandom;
  return std::nullopt;
}

} // namespace sbpm::api
