#include "sbpm/persistence.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include <json.hpp>

namespace sbpm {

SemanticViolationError::SemanticViolationError(std::vector<Violation> violations)
  : Error("SemanticViolation",
          "document is well-formed but its content is invalid", [&] {
            std::vector<std::string> lines;
            for (auto& v : violations)
              lines.push_back(to_string(v));
            return join(lines, "\n");
          }()),
    violations_(std::move(violations)) {
}

namespace {

using xml::Element;

// -- scalar encoding ------------------------------------------------------------

std::string num(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, r.ptr};
}

std::string flag(bool b) {
  return b ? "true" : "false";
}

[[noreturn]] void malformed(const Element& e, const std::string& why) {
  throw xml::ParseError("<" + e.name + ">: " + why, e.line, e.column);
}

const std::string& req(const Element& e, std::string_view key) {
  auto* v = e.find(key);
  if (!v)
    malformed(e, "missing attribute '" + std::string{key} + "'");
  return *v;
}

std::string opt(const Element& e, std::string_view key,
                std::string fallback = {}) {
  auto* v = e.find(key);
  return v ? *v : fallback;
}

template <class Int>
Int integer(const Element& e, std::string_view key, const std::string& text) {
  Int out{};
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  if (ec != std::errc{} || p != text.data() + text.size() || text.empty())
    malformed(e, "attribute '" + std::string{key} + "' is not an integer");
  return out;
}

template <class Int>
Int integer(const Element& e, std::string_view key, Int fallback) {
  auto* v = e.find(key);
  return v ? integer<Int>(e, key, *v) : fallback;
}

double real(const Element& e, std::string_view key, double fallback) {
  auto* v = e.find(key);
  if (!v)
    return fallback;
  double out = 0;
  auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc{} || p != v->data() + v->size() || v->empty()
      || !std::isfinite(out))
    malformed(e, "attribute '" + std::string{key} + "' is not a number");
  return out;
}

bool boolean(const Element& e, std::string_view key) {
  auto v = opt(e, key, "false");
  if (v == "true")
    return true;
  if (v != "false")
    malformed(e, "attribute '" + std::string{key} + "' must be true or false");
  return false;
}

// -- envelope -------------------------------------------------------------------

Element envelope(std::string_view kind) {
  Element doc{"document"};
  doc.set("format_version", std::to_string(format_version));
  doc.set("kind", std::string{kind});
  return doc;
}

void check_envelope(const Element& root) {
  if (root.name != "document")
    malformed(root, "root element must be <document>");
  auto& v = req(root, "format_version");
  auto version = integer<long long>(root, "format_version", v);
  if (version != format_version)
    throw Error("UnsupportedVersion",
                "format_version " + v + " is not supported (expected "
                  + std::to_string(format_version) + ")",
                v);
  req(root, "kind");
}

const Element& body(const Element& root, std::string_view kind,
                    std::string_view child) {
  check_envelope(root);
  if (req(root, "kind") != kind)
    malformed(root, "expected a " + std::string{kind} + " document, got "
                      + req(root, "kind"));
  auto items = root.all(child);
  if (items.size() != 1)
    malformed(root, "expected exactly one <" + std::string{child} + ">");
  return *items.front();
}

// -- model ----------------------------------------------------------------------

template <class T>
std::vector<T> sorted_by_id(std::vector<T> xs) {
  std::stable_sort(xs.begin(), xs.end(),
                   [](const T& a, const T& b) { return a.id < b.id; });
  return xs;
}

Element state_element(const State& s) {
  Element e{"state"};
  e.set("id", s.id);
  if (!s.label.empty())
    e.set("label", s.label);
  static constexpr const char* kinds[] = {"send", "receive", "action"};
  e.set("kind", kinds[s.activity.index()]);
  e.set("start", flag(s.is_start));
  e.set("end", flag(s.is_end));
  if (auto* send = std::get_if<SendActivity>(&s.activity)) {
    e.set("to", send->target_subject);
    e.set("message", send->message_id);
  } else if (auto* recv = std::get_if<ReceiveActivity>(&s.activity)) {
    for (auto& b : recv->branches)
      e.add(Element{"branch"})
        .set("from", b.source_subject)
        .set("message", b.message_id);
  } else {
    for (auto& o : std::get<ActionActivity>(s.activity).outcomes)
      e.add(Element{"outcome"}).set("name", o);
  }
  return e;
}

Element transition_element(const Transition& t) {
  Element e{"transition"};
  e.set("id", t.id);
  e.set("from", t.from_state);
  e.set("to", t.to_state);
  e.set("kind", t.kind == TransitionKind::Timeout ? "timeout" : "normal");
  if (!t.guard.empty())
    e.set("guard", t.guard);
  if (t.kind == TransitionKind::Timeout || t.timeout != 0)
    e.set("timeout", std::to_string(t.timeout));
  return e;
}

Element process_element(const ProcessModel& m) {
  Element p{"process"};
  p.set("id", m.id);
  p.set("name", m.name);
  for (auto& msg : sorted_by_id(m.messages)) {
    auto& e = p.add(Element{"message"});
    e.set("id", msg.id).set("name", msg.name);
    for (auto& k : msg.payload_schema)
      e.add(Element{"key"}).set("name", k);
  }
  for (auto& s : sorted_by_id(m.subjects)) {
    auto& e = p.add(Element{"subject"});
    e.set("id", s.id).set("name", s.name);
    e.set("kind", std::string{to_string(s.kind)});
    if (s.kind == SubjectKind::Multi || s.multiplicity_default != 1)
      e.set("multiplicity", std::to_string(s.multiplicity_default));
    if (s.behavior) {
      auto& b = e.add(Element{"behavior"});
      for (auto& st : sorted_by_id(s.behavior->states))
        b.add(state_element(st));
      for (auto& t : sorted_by_id(s.behavior->transitions))
        b.add(transition_element(t));
    }
  }
  auto channels = m.channels;
  std::stable_sort(channels.begin(), channels.end(),
                   [](const Channel& a, const Channel& b) {
                     return std::tie(a.from_subject, a.to_subject)
                            < std::tie(b.from_subject, b.to_subject);
                   });
  for (auto& c : channels) {
    auto& e = p.add(Element{"channel"});
    e.set("from", c.from_subject).set("to", c.to_subject);
    for (auto& id : c.message_ids)
      e.add(Element{"carries"}).set("message", id);
  }
  return p;
}

State read_state(const Element& e) {
  State s;
  s.id = req(e, "id");
  s.label = opt(e, "label");
  s.is_start = boolean(e, "start");
  s.is_end = boolean(e, "end");
  auto& kind = req(e, "kind");
  if (kind == "send") {
    s.activity = SendActivity{req(e, "to"), req(e, "message")};
  } else if (kind == "receive") {
    ReceiveActivity r;
    for (auto* b : e.all("branch"))
      r.branches.push_back({req(*b, "from"), req(*b, "message")});
    s.activity = std::move(r);
  } else if (kind == "action") {
    ActionActivity a;
    for (auto* o : e.all("outcome"))
      a.outcomes.push_back(req(*o, "name"));
    s.activity = std::move(a);
  } else {
    malformed(e, "unknown state kind '" + kind + "'");
  }
  return s;
}

Transition read_transition(const Element& e) {
  Transition t;
  t.id = req(e, "id");
  t.from_state = req(e, "from");
  t.to_state = req(e, "to");
  auto kind = opt(e, "kind", "normal");
  if (kind == "timeout")
    t.kind = TransitionKind::Timeout;
  else if (kind != "normal")
    malformed(e, "unknown transition kind '" + kind + "'");
  t.guard = opt(e, "guard");
  t.timeout = integer<std::int64_t>(e, "timeout", std::int64_t{0});
  return t;
}

ProcessModel read_process(const Element& p) {
  ProcessModel m;
  m.id = req(p, "id");
  m.name = opt(p, "name");
  for (auto* e : p.all("message")) {
    MessageType msg{req(*e, "id"), opt(*e, "name"), {}};
    for (auto* k : e->all("key"))
      msg.payload_schema.push_back(req(*k, "name"));
    m.messages.push_back(std::move(msg));
  }
  for (auto* e : p.all("subject")) {
    Subject s;
    s.id = req(*e, "id");
    s.name = opt(*e, "name");
    auto kind = parse_subject_kind(req(*e, "kind"));
    if (!kind)
      malformed(*e, "unknown subject kind '" + req(*e, "kind") + "'");
    s.kind = *kind;
    s.multiplicity_default = integer<int>(*e, "multiplicity", 1);
    auto behaviors = e->all("behavior");
    if (behaviors.size() > 1)
      malformed(*e, "more than one <behavior>");
    if (!behaviors.empty()) {
      Behavior b;
      for (auto* st : behaviors.front()->all("state"))
        b.states.push_back(read_state(*st));
      for (auto* t : behaviors.front()->all("transition"))
        b.transitions.push_back(read_transition(*t));
      s.behavior = std::move(b);
    }
    m.subjects.push_back(std::move(s));
  }
  for (auto* e : p.all("channel")) {
    Channel c{req(*e, "from"), req(*e, "to"), {}};
    for (auto* k : e->all("carries"))
      c.message_ids.push_back(req(*k, "message"));
    m.channels.push_back(std::move(c));
  }
  return m;
}

// -- layout ---------------------------------------------------------------------

void write_diagram(Element& e, const BlockDiagram& d) {
  e.set("flow", std::string{to_string(d.flow.axis)});
  e.set("snap", num(d.flow.snap_threshold));
  e.set("gap", num(d.flow.gap));
  e.add(Element{"stage"})
    .set("x", num(d.stage.x))
    .set("y", num(d.stage.y))
    .set("width", num(d.stage.width))
    .set("height", num(d.stage.height));
  for (auto& b : sorted_by_id(d.blocks)) {
    auto& be = e.add(Element{"block"});
    be.set("id", b.id).set("kind", b.kind);
    be.set("x", num(b.position.x)).set("y", num(b.position.y));
    be.set("width", num(b.width)).set("height", num(b.height));
    if (!b.label.empty())
      be.set("label", b.label);
    for (auto& [k, v] : b.properties)
      be.add(Element{"property"}).set("key", k).set("value", v);
  }
  for (auto& a : sorted_by_id(d.arrows)) {
    auto& ae = e.add(Element{"arrow"});
    ae.set("id", a.id).set("from", a.from_block).set("to", a.to_block);
    if (!a.label.empty())
      ae.set("label", a.label);
  }
}

BlockDiagram read_diagram(const Element& e, const std::string& layer,
                          std::vector<Violation>& out) {
  BlockDiagram d;
  auto flow = opt(e, "flow", "top-down");
  if (flow == "left-right")
    d.flow.axis = FlowAxis::LeftRight;
  else if (flow != "top-down")
    malformed(e, "unknown flow '" + flow + "'");
  d.flow.snap_threshold = real(e, "snap", 20);
  d.flow.gap = real(e, "gap", 0);
  if (auto stages = e.all("stage"); !stages.empty()) {
    auto& s = *stages.front();
    d.stage = {real(s, "x", 0), real(s, "y", 0), real(s, "width", 1000),
               real(s, "height", 800)};
  }
  std::set<std::string> ids;
  for (auto* be : e.all("block")) {
    Block b;
    b.id = req(*be, "id");
    b.kind = req(*be, "kind");
    b.position = {real(*be, "x", 0), real(*be, "y", 0)};
    b.width = real(*be, "width", 80);
    b.height = real(*be, "height", 40);
    b.label = opt(*be, "label");
    for (auto* p : be->all("property"))
      b.properties.emplace_back(req(*p, "key"), opt(*p, "value"));
    if (!ids.insert(b.id).second)
      out.push_back(make_violation("DuplicateId", layer, b.id, "block"));
    if (!(b.width > 0) || !(b.height > 0))
      out.push_back(make_violation("InvalidSize", layer, b.id));
    d.blocks.push_back(std::move(b));
  }
  std::set<std::string> arrow_ids;
  for (auto* ae : e.all("arrow")) {
    Arrow a{req(*ae, "id"), req(*ae, "from"), req(*ae, "to"), opt(*ae, "label"),
            {}};
    if (!arrow_ids.insert(a.id).second)
      out.push_back(make_violation("DuplicateId", layer, a.id, "arrow"));
    if (!ids.count(a.from_block) || !ids.count(a.to_block))
      out.push_back(make_violation("DanglingReference", layer, a.id,
                                   a.from_block + "->" + a.to_block));
    else if (a.from_block == a.to_block)
      out.push_back(make_violation("SameBlock", layer, a.id));
    d.arrows.push_back(std::move(a));
  }
  return d;
}

void route_all(BlockDiagram& d) {
  for (auto& a : d.arrows)
    a.waypoints = route_arrow(d, a.from_block, a.to_block).waypoints;
}

// -- notation -------------------------------------------------------------------

Element notation_element(const NotationDefinition& n) {
  Element e{"notation"};
  e.set("id", n.id);
  for (auto& c : sorted_by_id(n.constructs)) {
    auto& ce = e.add(Element{"construct"});
    ce.set("id", c.id).set("name", c.name);
    if (!c.description.empty())
      ce.set("description", c.description);
  }
  for (auto& k : sorted_by_id(n.kinds)) {
    auto& ke = e.add(Element{"blockkind"});
    ke.set("id", k.id).set("name", k.name);
    ke.set("layer", std::to_string(k.layer));
    ke.set("shape", std::string{BlockKind::shape});
    ke.set("color", to_hex(k.color));
    ke.set("brightness", std::to_string(k.brightness));
    if (k.texture)
      ke.set("texture", *k.texture);
    ke.set("size", std::string{to_string(k.size_class)});
    ke.set("orientation", std::to_string(k.orientation));
  }
  for (auto& r : n.rules) {
    auto& re = e.add(Element{"rule"});
    re.set("from", r.from_kind).set("to", r.to_kind);
    re.set("relation", std::string{to_string(r.relation)});
    if (r.max_out_degree)
      re.set("max_out_degree", std::to_string(*r.max_out_degree));
  }
  for (auto& m : n.mapping)
    e.add(Element{"map"}).set("kind", m.kind).set("construct", m.construct);
  return e;
}

NotationDefinition read_notation(const Element& e) {
  NotationDefinition n;
  n.id = req(e, "id");
  for (auto* c : e.all("construct"))
    n.constructs.push_back(
      {req(*c, "id"), opt(*c, "name"), opt(*c, "description")});
  for (auto* k : e.all("blockkind")) {
    BlockKind b;
    b.id = req(*k, "id");
    b.name = opt(*k, "name");
    b.layer = integer<int>(*k, "layer", 0);
    if (auto shape = opt(*k, "shape", std::string{BlockKind::shape});
        shape != BlockKind::shape)
      malformed(*k, "only rectangle blocks exist, got '" + shape + "'");
    auto color = parse_hex(req(*k, "color"));
    if (!color)
      malformed(*k, "color must be #rrggbb");
    b.color = *color;
    b.brightness = integer<int>(*k, "brightness", 50);
    if (auto* t = k->find("texture"))
      b.texture = *t;
    auto size = parse_size_class(opt(*k, "size", "M"));
    if (!size)
      malformed(*k, "size must be S, M or L");
    b.size_class = *size;
    b.orientation = integer<int>(*k, "orientation", 0);
    n.kinds.push_back(std::move(b));
  }
  for (auto* r : e.all("rule")) {
    GrammarRule g;
    g.from_kind = req(*r, "from");
    g.to_kind = req(*r, "to");
    auto rel = parse_relation(req(*r, "relation"));
    if (!rel)
      malformed(*r, "unknown relation '" + req(*r, "relation") + "'");
    g.relation = *rel;
    if (r->find("max_out_degree"))
      g.max_out_degree = integer<int>(*r, "max_out_degree", 0);
    n.rules.push_back(std::move(g));
  }
  for (auto* m : e.all("map"))
    n.mapping.push_back({req(*m, "kind"), req(*m, "construct")});
  return n;
}

// -- trace ----------------------------------------------------------------------

Element event_element(const TraceEvent& ev) {
  Element e{"event"};
  e.set("seq", std::to_string(ev.seq));
  e.set("time", std::to_string(ev.time));
  e.set("agent", ev.agent);
  e.set("kind", std::string{to_string(ev.kind)});
  auto maybe = [&](const char* key, const std::string& v) {
    if (!v.empty())
      e.set(key, v);
  };
  maybe("message", ev.message_id);
  maybe("peer", ev.peer);
  maybe("outcome", ev.outcome);
  maybe("from", ev.from_state);
  maybe("to", ev.to_state);
  if (ev.uid != 0)
    e.set("uid", std::to_string(ev.uid));
  for (auto& d : ev.deliveries)
    e.add(Element{"delivery"})
      .set("uid", std::to_string(d.uid))
      .set("to", d.to_agent);
  for (auto& [k, v] : ev.payload)
    e.add(Element{"payload"}).set("key", k).set("value", v);
  return e;
}

TraceEvent read_event(const Element& e) {
  TraceEvent ev;
  ev.seq = integer<std::uint64_t>(e, "seq", req(e, "seq"));
  ev.time = integer<std::int64_t>(e, "time", req(e, "time"));
  ev.agent = req(e, "agent");
  auto kind = parse_event_kind(req(e, "kind"));
  if (!kind)
    malformed(e, "unknown event kind '" + req(e, "kind") + "'");
  ev.kind = *kind;
  ev.message_id = opt(e, "message");
  ev.peer = opt(e, "peer");
  ev.outcome = opt(e, "outcome");
  ev.from_state = opt(e, "from");
  ev.to_state = opt(e, "to");
  ev.uid = integer<std::uint64_t>(e, "uid", std::uint64_t{0});
  for (auto* d : e.all("delivery"))
    ev.deliveries.push_back(
      {integer<std::uint64_t>(*d, "uid", req(*d, "uid")), req(*d, "to")});
  for (auto* p : e.all("payload"))
    ev.payload[req(*p, "key")] = opt(*p, "value");
  return ev;
}

// -- dot --------------------------------------------------------------------------

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\')
      out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

// -- json -------------------------------------------------------------------------

using ojson = nlohmann::ordered_json;

ojson element_json(const Element& e) {
  ojson out;
  out["name"] = e.name;
  out["attributes"] = ojson::object();
  for (auto& [k, v] : e.attributes)
    out["attributes"][k] = v;
  out["children"] = ojson::array();
  for (auto& c : e.children)
    out["children"].push_back(element_json(c));
  if (!e.text.empty())
    out["text"] = e.text;
  return out;
}

Element json_element(const ojson& j, std::size_t depth) {
  auto bad = [](const std::string& why) -> Element {
    throw xml::ParseError("JSON document: " + why, 0, 0);
  };
  if (depth > 256)
    return bad("nesting too deep");
  if (!j.is_object() || !j.contains("name") || !j["name"].is_string())
    return bad("element needs a string \"name\"");
  Element e{j["name"].get<std::string>()};
  if (auto it = j.find("attributes"); it != j.end()) {
    if (!it->is_object())
      return bad("\"attributes\" must be an object");
    for (auto& [k, v] : it->items()) {
      if (!v.is_string())
        return bad("attribute '" + k + "' must be a string");
      e.set(k, v.get<std::string>());
    }
  }
  if (auto it = j.find("children"); it != j.end()) {
    if (!it->is_array())
      return bad("\"children\" must be an array");
    for (auto& c : *it)
      e.children.push_back(json_element(c, depth + 1));
  }
  if (auto it = j.find("text"); it != j.end()) {
    if (!it->is_string())
      return bad("\"text\" must be a string");
    e.text = it->get<std::string>();
  }
  return e;
}

} // namespace

std::string to_xml(const ProcessModel& model,
                   const std::optional<LayeredDiagram>& layout) {
  auto doc = envelope("Model");
  doc.add(process_element(model));
  if (layout) {
    auto& l = doc.add(Element{"layout"});
    write_diagram(l, layout->interaction);
    for (auto& [subject, d] : layout->behaviors) {
      Element layer{"layer"};
      layer.set("subject", subject);
      write_diagram(layer, d);
      l.add(std::move(layer));
    }
  }
  return xml::write(doc);
}

ModelDocument from_xml(std::string_view text) {
  auto root = xml::parse(text);
  auto& p = body(root, "Model", "process");
  auto built = build_model(read_process(p));
  std::vector<Violation> problems = built.violations();
  std::optional<LayeredDiagram> layout;
  auto layouts = root.all("layout");
  if (layouts.size() > 1)
    malformed(root, "more than one <layout>");
  if (!layouts.empty()) {
    auto& l = *layouts.front();
    LayeredDiagram ld;
    ld.interaction = read_diagram(l, "", problems);
    for (auto* layer : l.all("layer")) {
      auto& subject = req(*layer, "subject");
      if (ld.behaviors.count(subject))
        problems.push_back(make_violation("DuplicateId", subject, "",
                                          "layer listed twice"));
      ld.behaviors[subject] = read_diagram(*layer, subject, problems);
      if (built.ok()) {
        auto* s = built.value().find_subject(subject);
        if (!s || !s->behavior)
          problems.push_back(make_violation(
            "DanglingReference", subject, "",
            "layer for unknown or external subject"));
      }
    }
    layout = std::move(ld);
  }
  if (!problems.empty()) {
    normalize(problems);
    throw SemanticViolationError(std::move(problems));
  }
  if (layout) {
    route_all(layout->interaction);
    for (auto& [_, d] : layout->behaviors)
      route_all(d);
  }
  return {std::move(built).value(), std::move(layout)};
}

std::string notation_to_xml(const NotationDefinition& notation) {
  auto doc = envelope("Notation");
  doc.add(notation_element(notation));
  return xml::write(doc);
}

NotationDefinition notation_from_xml(std::string_view text) {
  auto root = xml::parse(text);
  auto defined = define_notation(read_notation(body(root, "Notation", "notation")));
  if (!defined.ok())
    throw SemanticViolationError(defined.violations());
  return std::move(defined).value();
}

std::string trace_to_xml(const TraceDocument& trace) {
  auto doc = envelope("Trace");
  auto& t = doc.add(Element{"trace"});
  t.set("status", std::string{to_string(trace.status)});
  t.set("clock", std::to_string(trace.clock));
  for (auto& ev : trace.trace.events)
    t.add(event_element(ev));
  return xml::write(doc);
}

TraceDocument trace_from_xml(std::string_view text) {
  auto root = xml::parse(text);
  auto& t = body(root, "Trace", "trace");
  TraceDocument out;
  auto status = parse_instance_status(req(t, "status"));
  if (!status)
    malformed(t, "unknown status '" + req(t, "status") + "'");
  out.status = *status;
  out.clock = integer<std::int64_t>(t, "clock", std::int64_t{0});
  for (auto* e : t.all("event"))
    out.trace.events.push_back(read_event(*e));
  return out;
}

std::string document_kind(std::string_view text) {
  auto root = xml::parse(text);
  check_envelope(root);
  return req(root, "kind");
}

std::string export_dot(const ProcessModel& model) {
  std::string out = "digraph \"SID\" {\n";
  for (auto& s : sorted_by_id(model.subjects)) {
    out += "  " + quote(s.id) + " [label=" + quote(s.name) + ", shape=box";
    if (s.kind == SubjectKind::Multi)
      out += ", peripheries=2";
    if (s.kind == SubjectKind::External)
      out += ", style=dashed";
    out += "];\n";
  }
  for (auto& c : model.channels)
    out += "  " + quote(c.from_subject) + " -> " + quote(c.to_subject)
           + " [label=" + quote(join(c.message_ids, ", ")) + "];\n";
  out += "}\n";
  static constexpr const char* kinds[] = {"send", "receive", "action"};
  for (auto& s : sorted_by_id(model.subjects)) {
    if (!s.behavior)
      continue;
    out += "digraph " + quote(s.id) + " {\n";
    for (auto& st : sorted_by_id(s.behavior->states)) {
      out += "  " + quote(st.id) + " [label="
             + quote(st.id + "\n" + kinds[st.activity.index()]);
      if (st.is_start)
        out += ", style=bold";
      if (st.is_end)
        out += ", peripheries=2";
      out += "];\n";
    }
    for (auto& t : sorted_by_id(s.behavior->transitions)) {
      auto label = t.kind == TransitionKind::Timeout
                     ? "timeout " + std::to_string(t.timeout)
                     : t.guard;
      out += "  " + quote(t.from_state) + " -> " + quote(t.to_state)
             + " [label=" + quote(label) + "];\n";
    }
    out += "}\n";
  }
  return out;
}

std::string xml_to_json(std::string_view xml_text) {
  auto root = xml::parse(xml_text);
  check_envelope(root);
  return element_json(root).dump(2) + "\n";
}

std::string json_to_xml(std::string_view json_text) {
  auto j = ojson::parse(json_text.begin(), json_text.end(), nullptr, false);
  if (j.is_discarded())
    throw xml::ParseError("JSON document: not valid JSON", 0, 0);
  return xml::write(json_element(j, 0));
}

} // namespace sbpm
