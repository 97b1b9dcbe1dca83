#include "sbpm/notation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

namespace sbpm {

std::string to_hex(Rgb c) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out = "#";
  for (auto v : {c.r, c.g, c.b}) {
    out += digits[v >> 4];
    out += digits[v & 0xf];
  }
  return out;
}

std::optional<Rgb> parse_hex(std::string_view text) {
  if (text.size() != 7 || text[0] != '#')
    return std::nullopt;
  std::array<std::uint8_t, 3> parts{};
  for (size_t i = 0; i < 3; ++i) {
    auto first = text.data() + 1 + 2 * i;
    unsigned v = 0;
    auto [ptr, ec] = std::from_chars(first, first + 2, v, 16);
    if (ec != std::errc{} || ptr != first + 2)
      return std::nullopt;
    parts[i] = static_cast<std::uint8_t>(v);
  }
  return Rgb{parts[0], parts[1], parts[2]};
}

double color_distance(Rgb x, Rgb y) noexcept {
  auto d = [](int a, int b) { return double(a - b) * double(a - b); };
  return std::sqrt(d(x.r, y.r) + d(x.g, y.g) + d(x.b, y.b));
}

std::string_view to_string(SizeClass s) {
  switch (s) {
    case SizeClass::S:
      return "S";
    case SizeClass::M:
      return "M";
    case SizeClass::L:
      return "L";
  }
  return "M";
}

std::optional<SizeClass> parse_size_class(std::string_view text) {
  if (text == "S")
    return SizeClass::S;
  if (text == "M")
    return SizeClass::M;
  if (text == "L")
    return SizeClass::L;
  return std::nullopt;
}

std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::MayFollow:
      return "may-follow";
    case Relation::MustFollow:
      return "must-follow";
    case Relation::Forbidden:
      return "forbidden";
  }
  return "may-follow";
}

std::optional<Relation> parse_relation(std::string_view text) {
  if (text == "may-follow")
    return Relation::MayFollow;
  if (text == "must-follow")
    return Relation::MustFollow;
  if (text == "forbidden")
    return Relation::Forbidden;
  return std::nullopt;
}

const BlockKind* NotationDefinition::find_kind(std::string_view id) const {
  for (auto& k : kinds)
    if (k.id == id)
      return &k;
  return nullptr;
}

std::vector<std::string>
NotationDefinition::constructs_of(std::string_view kind) const {
  std::vector<std::string> out;
  for (auto& m : mapping)
    if (m.kind == kind
        && std::find(out.begin(), out.end(), m.construct) == out.end())
      out.push_back(m.construct);
  return out;
}

Checked<NotationDefinition> define_notation(NotationDefinition parts) {
  std::vector<Violation> out;
  std::set<std::string> kind_ids;
  for (auto& k : parts.kinds) {
    if (k.id.empty())
      out.push_back(make_violation("EmptyId", "", "", "kind"));
    else if (!kind_ids.insert(k.id).second)
      out.push_back(make_violation("DuplicateId", "", k.id, "kind"));
    if (k.brightness < 0 || k.brightness > 100)
      out.push_back(make_violation("BadVisualVariable", "", k.id,
                                   "brightness " + std::to_string(k.brightness)));
    if (k.orientation != 0 && k.orientation != 90)
      out.push_back(make_violation("BadVisualVariable", "", k.id,
                                   "orientation "
                                     + std::to_string(k.orientation)));
  }
  std::set<std::string> construct_ids;
  for (auto& c : parts.constructs) {
    if (c.id.empty())
      out.push_back(make_violation("EmptyId", "", "", "construct"));
    else if (!construct_ids.insert(c.id).second)
      out.push_back(make_violation("DuplicateId", "", c.id, "construct"));
  }
  std::map<std::pair<std::string, std::string>, std::set<Relation>> pairs;
  for (auto& r : parts.rules) {
    auto element = r.from_kind + "->" + r.to_kind;
    if (!kind_ids.count(r.from_kind))
      out.push_back(make_violation("DanglingKind", "", element, r.from_kind));
    if (!kind_ids.count(r.to_kind))
      out.push_back(make_violation("DanglingKind", "", element, r.to_kind));
    if (r.max_out_degree && *r.max_out_degree < 1)
      out.push_back(make_violation("BadRule", "", element,
                                   "max_out_degree must be positive"));
    pairs[{r.from_kind, r.to_kind}].insert(r.relation);
  }
  for (auto& [key, rels] : pairs)
    if (rels.count(Relation::Forbidden)
        && (rels.count(Relation::MayFollow) || rels.count(Relation::MustFollow)))
      out.push_back(make_violation("ContradictoryRule", "",
                                   key.first + "->" + key.second));
  for (auto& m : parts.mapping) {
    auto element = m.kind + "=>" + m.construct;
    if (!kind_ids.count(m.kind))
      out.push_back(make_violation("DanglingKind", "", element, m.kind));
    if (!construct_ids.count(m.construct))
      out.push_back(make_violation("DanglingConstruct", "", element,
                                   m.construct));
  }
  if (!out.empty()) {
    normalize(out);
    return out;
  }
  auto by_id = [](const auto& a, const auto& b) { return a.id < b.id; };
  std::stable_sort(parts.kinds.begin(), parts.kinds.end(), by_id);
  std::stable_sort(parts.constructs.begin(), parts.constructs.end(), by_id);
  return parts;
}

NotationDefinition sbpm_default_notation() {
  NotationDefinition n;
  n.id = "sbpm";
  struct Row {
    const char* kind;
    const char* name;
    int layer;
    Rgb color;
    const char* icon;
    SizeClass size;
    std::string_view construct;
    const char* description;
  };
  const Row rows[] = {
    {"subject", "Subject", 1, {46, 111, 216}, "person", SizeClass::L,
     construct::subject, "process participant instantiated as one agent"},
    {"multi-subject", "Multi-subject", 1, {138, 79, 216}, "people",
     SizeClass::L, construct::multi_subject,
     "participant instantiated as several agents receiving broadcasts"},
    {"external-subject", "External subject", 1, {127, 127, 127}, "cloud",
     SizeClass::L, construct::external_subject,
     "participant whose internal behavior is unknown"},
    {"channel", "Channel", 1, {224, 176, 32}, "envelope", SizeClass::M,
     construct::channel, "unidirectional message channel between subjects"},
    {"send", "Send", 2, {224, 80, 42}, "envelope-out", SizeClass::M,
     construct::send, "send a message to a subject"},
    {"receive", "Receive", 2, {42, 168, 74}, "envelope-in", SizeClass::M,
     construct::receive, "wait for a message from a subject"},
    {"action", "Action", 2, {79, 195, 247}, "gear", SizeClass::M,
     construct::action, "internal activity with named outcomes"},
    {"start", "Start flag", 2, {255, 255, 255}, "flag-start", SizeClass::S,
     construct::start_flag, "marks the first activity"},
    {"end", "End flag", 2, {32, 32, 32}, "flag-end", SizeClass::S,
     construct::end_flag, "marks a final activity"},
    {"transition", "Transition", 2, {176, 176, 176}, "arrow", SizeClass::S,
     construct::transition, "normal control flow between activities"},
    {"timeout-transition", "Timeout transition", 2, {255, 158, 200}, "clock",
     SizeClass::S, construct::timeout_transition,
     "exceptional exit from a receive after a relative time"},
  };
  for (auto& r : rows) {
    BlockKind k;
    k.id = r.kind;
    k.name = r.name;
    k.layer = r.layer;
    k.color = r.color;
    k.texture = r.icon;
    k.size_class = r.size;
    n.kinds.push_back(std::move(k));
    n.constructs.push_back({std::string{r.construct}, r.name, r.description});
    n.mapping.push_back({r.kind, std::string{r.construct}});
  }
  auto rule = [&](const char* from, const char* to, Relation rel,
                  std::optional<int> max = std::nullopt) {
    n.rules.push_back({from, to, rel, max});
  };
  const char* activities[] = {"send", "receive", "action"};
  const char* layer2[] = {"send", "receive", "action", "start",
                          "end", "transition", "timeout-transition"};
  for (auto* k : layer2) {
    rule("end", k, Relation::Forbidden);
    if (std::string_view{k} != "end")
      rule(k, "start", Relation::Forbidden);
  }
  rule("start", "transition", Relation::Forbidden);
  rule("start", "timeout-transition", Relation::Forbidden);
  rule("send", "timeout-transition", Relation::Forbidden);
  rule("action", "timeout-transition", Relation::Forbidden);
  rule("receive", "timeout-transition", Relation::MayFollow, 1);
  rule("transition", "end", Relation::Forbidden);
  rule("timeout-transition", "end", Relation::Forbidden);
  for (auto* a : activities) {
    rule("start", a, Relation::MayFollow, 1);
    rule("transition", a, Relation::MayFollow, 1);
    rule("timeout-transition", a, Relation::MayFollow, 1);
  }
  const char* subjects[] = {"subject", "multi-subject", "external-subject"};
  for (auto* s : subjects) {
    rule(s, "channel", Relation::MayFollow);
    rule("channel", s, Relation::MayFollow, 1);
  }
  rule("channel", "channel", Relation::Forbidden);
  return define_notation(std::move(n)).value();
}

// -- conformance ---------------------------------------------------------------

std::vector<Violation> conformance_check(const BlockDiagram& diagram,
                                         const NotationDefinition& notation,
                                         std::string_view layer) {
  std::map<std::string, std::string> kind_of;
  for (auto& b : diagram.blocks) {
    if (!notation.find_kind(b.kind))
      throw Error("UnknownKind",
                  "block '" + b.id + "' uses kind '" + b.kind
                    + "' which is not part of notation '" + notation.id + "'",
                  b.id);
    kind_of[b.id] = b.kind;
  }
  std::string subject{layer};
  std::vector<Violation> out;
  std::map<std::string, std::set<std::string>> successors;
  for (auto& c : infer_connections(diagram)) {
    auto ka = kind_of.find(c.from_block);
    auto kb = kind_of.find(c.to_block);
    if (ka == kind_of.end() || kb == kind_of.end())
      continue;
    successors[c.from_block].insert(c.to_block);
    for (auto& r : notation.rules)
      if (r.relation == Relation::Forbidden && r.from_kind == ka->second
          && r.to_kind == kb->second)
        out.push_back(make_violation("ForbiddenConnection", subject,
                                     c.from_block,
                                     c.from_block + "->" + c.to_block + " ("
                                       + ka->second + "->" + kb->second + ")"));
  }
  for (auto& [block, succ] : successors) {
    const auto& kind = kind_of[block];
    for (auto& r : notation.rules) {
      if (r.from_kind != kind)
        continue;
      size_t matching = 0;
      for (auto& s : succ)
        matching += kind_of[s] == r.to_kind ? 1 : 0;
      if (r.relation == Relation::MustFollow && matching == 0)
        out.push_back(make_violation("MissingRequiredSuccessor", subject,
                                     block, "needs a " + r.to_kind));
      if (r.max_out_degree && matching > size_t(*r.max_out_degree))
        out.push_back(make_violation(
          "OutDegreeExceeded", subject, block,
          std::to_string(matching) + " successors of kind " + r.to_kind
            + ", at most " + std::to_string(*r.max_out_degree)));
    }
  }
  normalize(out);
  return out;
}

std::vector<Violation> conformance_check(const LayeredDiagram& diagram,
                                         const NotationDefinition& notation) {
  auto out = conformance_check(diagram.interaction, notation);
  for (auto& [subject, layer] : diagram.behaviors) {
    auto more = conformance_check(layer, notation, subject);
    out.insert(out.end(), more.begin(), more.end());
  }
  normalize(out);
  return out;
}

// -- analysis ------------------------------------------------------------------

AnomalyReport ontological_analysis(const NotationDefinition& notation) {
  std::set<std::pair<std::string, std::string>> pairs;
  for (auto& m : notation.mapping)
    pairs.emplace(m.kind, m.construct);
  std::map<std::string, size_t> per_kind;
  std::map<std::string, size_t> per_construct;
  for (auto& [k, c] : pairs) {
    ++per_kind[k];
    ++per_construct[c];
  }
  AnomalyReport r;
  for (auto& c : notation.constructs) {
    auto n = per_construct.count(c.id) ? per_construct[c.id] : 0;
    if (n == 0)
      r.deficits.push_back(c.id);
    else if (n > 1)
      r.redundancies.push_back(c.id);
  }
  for (auto& k : notation.kinds) {
    auto n = per_kind.count(k.id) ? per_kind[k.id] : 0;
    if (n == 0)
      r.excesses.push_back(k.id);
    else if (n > 1)
      r.overloads.push_back(k.id);
  }
  for (auto* xs : {&r.deficits, &r.redundancies, &r.overloads, &r.excesses}) {
    std::sort(xs->begin(), xs->end());
    xs->erase(std::unique(xs->begin(), xs->end()), xs->end());
  }
  return r;
}

std::vector<Lint> design_lints(const NotationDefinition& notation,
                               const LintConfig& config) {
  std::vector<Lint> out;
  const auto& ks = notation.kinds;
  for (size_t i = 0; i < ks.size(); ++i) {
    for (size_t j = i + 1; j < ks.size(); ++j) {
      if (ks[i].layer != ks[j].layer && ks[i].layer != 0 && ks[j].layer != 0)
        continue;
      auto d = color_distance(ks[i].color, ks[j].color);
      if (d < config.min_color_distance) {
        auto a = std::min(ks[i].id, ks[j].id);
        auto b = std::max(ks[i].id, ks[j].id);
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.1f", d);
        out.push_back({"LowDiscriminability", {a, b},
                       std::string{"color distance "} + buf});
      }
    }
  }
  std::map<int, std::vector<std::string>> per_layer;
  for (auto& k : ks)
    per_layer[k.layer].push_back(k.id);
  for (auto& [layer, ids] : per_layer) {
    if (ids.size() <= config.max_kinds_per_layer)
      continue;
    std::sort(ids.begin(), ids.end());
    out.push_back({"GraphicEconomyExceeded", ids,
                   "layer " + std::to_string(layer) + " has "
                     + std::to_string(ids.size()) + " symbols, limit "
                     + std::to_string(config.max_kinds_per_layer)});
  }
  if (!ks.empty()) {
    auto constant = [&](auto field) {
      return std::all_of(ks.begin(), ks.end(), [&](const BlockKind& k) {
        return field(k) == field(ks.front());
      });
    };
    std::vector<std::string> unused;
    if (constant([](const BlockKind& k) { return k.color; }))
      unused.push_back("color");
    if (constant([](const BlockKind& k) { return k.brightness; }))
      unused.push_back("brightness");
    if (constant([](const BlockKind& k) { return k.orientation; }))
      unused.push_back("orientation");
    if (constant([](const BlockKind& k) { return k.size_class; }))
      unused.push_back("size");
    if (constant([](const BlockKind& k) { return k.texture; }))
      unused.push_back("texture");
    if (!unused.empty())
      out.push_back({"UnusedVisualVariables", unused,
                     std::to_string(unused.size())
                       + " of 5 free visual variables unused"});
  }
  std::sort(out.begin(), out.end(), [](const Lint& x, const Lint& y) {
    return std::tie(x.code, x.kinds) < std::tie(y.code, y.kinds);
  });
  return out;
}

} // namespace sbpm
