#include <doctest.h>

#include <algorithm>

#include "sbpm/translate.hpp"
#include "support/generators.hpp"

using namespace sbpm;

namespace {

Block block(std::string id, std::string kind, double x, double y,
            std::vector<Property> props = {}, double w = 80, double h = 40) {
  Block b;
  b.id = std::move(id);
  b.kind = std::move(kind);
  b.position = {x, y};
  b.width = w;
  b.height = h;
  b.properties = std::move(props);
  return b;
}

/// Ping-pong drawn with a channel block, a labeled arrow and docked chains.
LayeredDiagram pingpong_blocks() {
  LayeredDiagram d;
  auto& sid = d.interaction;
  sid.blocks = {block("A", "subject", 0, 0), block("B", "subject", 400, 0),
                block("ping_ch", "channel", 0, 40, {{"ping", ""}})};
  sid = add_arrow(sid, "c1", "ping_ch", "B");
  sid = add_arrow(sid, "c2", "B", "A", "pong");
  auto& a = d.behaviors["A"];
  a.blocks = {block("st", "start", 0, 0, {}, 80, 20),
              block("a0", "send", 0, 20, {{"to", "B"}, {"message", "ping"}}),
              block("a1", "receive", 0, 60, {{"from.B", "pong"}}),
              block("a2", "action", 0, 100),
              block("en", "end", 0, 140, {}, 80, 20)};
  auto& b = d.behaviors["B"];
  b.blocks = {block("st", "start", 0, 0, {}, 80, 20),
              block("b0", "receive", 0, 20, {{"from.A", "ping"}}),
              block("b1", "send", 0, 60, {{"to", "A"}, {"message", "pong"}}),
              block("b2", "action", 0, 100),
              block("en", "end", 0, 140, {}, 80, 20)};
  return d;
}

bool has_code(const std::vector<Violation>& vs, std::string_view code) {
  return std::any_of(vs.begin(), vs.end(),
                     [&](const Violation& v) { return v.code == code; });
}

} // namespace

TEST_SUITE("to_semantic_model") {
  const auto notation = sbpm_default_notation();

  TEST_CASE("ping-pong blocks") {
    auto r = to_semantic_model(pingpong_blocks(), notation, "pp");
    REQUIRE(r.ok());
    auto& m = r.value();
    CHECK(m.id == "pp");
    CHECK(m.has_channel("A", "B", "ping"));
    CHECK(m.has_channel("B", "A", "pong"));
    CHECK(well_formed(m).empty());
    CHECK(interface_consistency(m).empty());
    auto& a = drill_down(m, "A");
    CHECK(a.start_state()->id == "a0");
    CHECK(a.find_state("a2")->is_end);
    auto outs = a.outgoing("a1");
    REQUIRE(outs.size() == 1);
    CHECK(outs[0]->guard == "B:pong");
  }

  TEST_CASE("docking order follows the flow axis") {
    auto d = pingpong_blocks();
    for (auto* layer : {&d.behaviors["A"], &d.behaviors["B"]}) {
      layer->flow.axis = FlowAxis::LeftRight;
      for (auto& b : layer->blocks)
        std::swap(b.position.x, b.position.y);
    }
    // Heights along y become widths along x; re-pack the chain flush.
    for (auto* layer : {&d.behaviors["A"], &d.behaviors["B"]}) {
      double x = 0;
      for (auto& b : layer->blocks) {
        std::swap(b.width, b.height);
        b.position = {x, 0};
        x += b.width;
      }
    }
    auto r = to_semantic_model(d, notation, "pp");
    REQUIRE(r.ok());
    CHECK(r.value() == to_semantic_model(pingpong_blocks(), notation, "pp").value());
  }

  TEST_CASE("side-by-side docking without an arrow is ambiguous") {
    auto d = pingpong_blocks();
    auto& a = d.behaviors["A"];
    // Put a second action right of a2; top-down flow gives it no order.
    a.blocks.push_back(block("side", "action", 80, 100));
    auto r = to_semantic_model(d, notation);
    REQUIRE_FALSE(r.ok());
    CHECK(has_code(r.violations(), "AmbiguousDirection"));
  }

  TEST_CASE("grammar violations are reported, not translated") {
    auto d = pingpong_blocks();
    auto& a = d.behaviors["A"];
    a.blocks.push_back(block("after_end", "action", 0, 160));
    auto r = to_semantic_model(d, notation);
    REQUIRE_FALSE(r.ok());
    CHECK(has_code(r.violations(), "ForbiddenConnection"));
  }

  TEST_CASE("interaction layer only") {
    auto d = pingpong_blocks();
    auto r = to_semantic_model(d.interaction, notation, "sid");
    REQUIRE(r.ok());
    CHECK(r.value().subjects.size() == 2);
    CHECK(r.value().channels.size() == 2);
    for (auto& s : r.value().subjects)
      CHECK(s.behavior->states.empty());
  }

  TEST_CASE("multi subject multiplicity property") {
    auto d = pingpong_blocks();
    d.interaction.blocks[1].kind = "multi-subject";
    auto r = to_semantic_model(d, notation);
    REQUIRE(r.ok());
    CHECK(r.value().find_subject("B")->kind == SubjectKind::Multi);
    CHECK(r.value().find_subject("B")->multiplicity_default == 2);
    d.interaction.blocks[1].properties = {{"multiplicity", "5"}};
    CHECK(to_semantic_model(d, notation).value().find_subject("B")
            ->multiplicity_default == 5);
    d.interaction.blocks[1].properties = {{"multiplicity", "many"}};
    CHECK(has_code(to_semantic_model(d, notation).violations(), "BadProperty"));
  }

  TEST_CASE("block kinds of the wrong layer") {
    auto d = pingpong_blocks();
    d.interaction.blocks.push_back(block("oops", "send", 900, 900));
    auto r = to_semantic_model(d, notation);
    REQUIRE_FALSE(r.ok());
    CHECK(has_code(r.violations(), "MisplacedBlock"));
  }

  TEST_CASE("timeout blocks carry their duration") {
    auto d = pingpong_blocks();
    auto& a = d.behaviors["A"];
    a.blocks.push_back(block("t", "timeout-transition", 300, 60,
                             {{"duration", "10"}}, 60, 20));
    a = add_arrow(a, "in", "a1", "t");
    a = add_arrow(a, "out", "t", "a2");
    auto r = to_semantic_model(d, notation);
    REQUIRE(r.ok());
    auto outs = drill_down(r.value(), "A").outgoing("a1");
    REQUIRE(outs.size() == 2);
    auto t = std::find_if(outs.begin(), outs.end(), [](auto* x) {
      return x->kind == TransitionKind::Timeout;
    });
    REQUIRE(t != outs.end());
    CHECK((*t)->timeout == 10);
    CHECK((*t)->id == "t");
  }

  TEST_CASE("generated diagrams translate into checked models") {
    testing::Rng rng{47};
    for (int i = 0; i < 100; ++i) {
      auto d = testing::random_diagram(rng);
      auto r = to_semantic_model(d, notation);
      REQUIRE_MESSAGE(r.ok(), (r.ok() ? "" : to_string(r.violations()[0])));
      CHECK(well_formed(r.value()).empty());
      CHECK_FALSE(has_errors(interface_consistency(r.value())));
    }
  }

  TEST_CASE("implicit and explicit connections translate alike") {
    testing::Rng rng{53};
    for (int i = 0; i < 60; ++i) {
      auto d = testing::random_diagram(rng);
      auto docked = to_semantic_model(d, notation);
      auto spread = to_semantic_model(testing::spread_out(d), notation);
      REQUIRE(docked.ok());
      REQUIRE(spread.ok());
      CHECK(docked.value() == spread.value());
    }
  }
}
