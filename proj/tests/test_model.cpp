#include <doctest.h>

#include <algorithm>
#include <set>

#include "sbpm/model.hpp"
#include "support/generators.hpp"
#include "support/models.hpp"

using namespace sbpm;

namespace {

bool has_code(const std::vector<Violation>& vs, std::string_view code) {
  return std::any_of(vs.begin(), vs.end(),
                     [&](const Violation& v) { return v.code == code; });
}

} // namespace

TEST_SUITE("build_model") {
  TEST_CASE("empty lists give an empty valid model") {
    auto r = build_model({});
    REQUIRE(r.ok());
    CHECK(r.value().subjects.empty());
    CHECK(r.value().channels.empty());
  }

  TEST_CASE("customer to supplier channel carrying an order") {
    ProcessModel m;
    m.id = "order";
    m.messages = {{"Order", "Order", {}}};
    m.subjects = {{"Customer", "Customer", SubjectKind::Standard,
                   fixtures::start_end_behavior(), 1},
                  {"Supplier", "Supplier", SubjectKind::Standard,
                   fixtures::start_end_behavior(), 1}};
    m.channels = {{"Customer", "Supplier", {"Order"}}};
    auto r = build_model(m);
    REQUIRE(r.ok());
    CHECK(r.value().has_channel("Customer", "Supplier", "Order"));
    CHECK_FALSE(r.value().has_channel("Supplier", "Customer", "Order"));
  }

  TEST_CASE("channel to an unknown subject") {
    ProcessModel m;
    m.messages = {{"Order", "Order", {}}};
    m.subjects = {{"A", "A", SubjectKind::Standard,
                   fixtures::start_end_behavior(), 1}};
    m.channels = {{"A", "X", {"Order"}}};
    auto r = build_model(m);
    REQUIRE_FALSE(r.ok());
    REQUIRE(r.violations().size() == 1);
    CHECK(r.violations()[0].code == "DanglingReference");
    CHECK(r.violations()[0].detail.find("X") != std::string::npos);
  }

  TEST_CASE("duplicate ids and behavior ownership") {
    ProcessModel m;
    m.subjects = {{"A", "A", SubjectKind::Standard, std::nullopt, 1},
                  {"A", "A", SubjectKind::Standard,
                   fixtures::start_end_behavior(), 1},
                  {"E", "E", SubjectKind::External,
                   fixtures::start_end_behavior(), 1},
                  {"M", "M", SubjectKind::Multi, fixtures::start_end_behavior(),
                   0}};
    auto r = build_model(m);
    REQUIRE_FALSE(r.ok());
    CHECK(has_code(r.violations(), "DuplicateId"));
    CHECK(has_code(r.violations(), "MissingBehavior"));
    CHECK(has_code(r.violations(), "ExternalWithBehavior"));
    CHECK(has_code(r.violations(), "BadMultiplicity"));
    CHECK(std::is_sorted(r.violations().begin(), r.violations().end()));
  }

  TEST_CASE("self channels, empty channels and payload keys") {
    ProcessModel m;
    m.messages = {{"m", "m", {"k", "k"}}};
    m.subjects = {{"A", "A", SubjectKind::Standard,
                   fixtures::start_end_behavior(), 1},
                  {"B", "B", SubjectKind::Standard,
                   fixtures::start_end_behavior(), 1}};
    m.channels = {{"A", "A", {"m"}}, {"A", "B", {}}};
    auto r = build_model(m);
    REQUIRE_FALSE(r.ok());
    CHECK(has_code(r.violations(), "SelfChannel"));
    CHECK(has_code(r.violations(), "EmptyChannel"));
    CHECK(has_code(r.violations(), "DuplicatePayloadKey"));
  }

  TEST_CASE("repeated channel triple") {
    auto m = fixtures::pingpong();
    m.channels.push_back({"A", "B", {"ping"}});
    auto r = build_model(m);
    REQUIRE_FALSE(r.ok());
    CHECK(r.violations()[0].code == "DuplicateChannel");
  }

  TEST_CASE("normalization sorts and merges channels") {
    ProcessModel m;
    m.messages = {{"z", "z", {}}, {"a", "a", {}}};
    m.subjects = {{"B", "B", SubjectKind::Standard,
                   fixtures::start_end_behavior(), 1},
                  {"A", "A", SubjectKind::Standard,
                   fixtures::start_end_behavior(), 1}};
    m.channels = {{"A", "B", {"z"}}, {"A", "B", {"a"}}};
    auto r = build_model(m);
    REQUIRE(r.ok());
    auto& v = r.value();
    CHECK(v.subjects[0].id == "A");
    CHECK(v.messages[0].id == "a");
    REQUIRE(v.channels.size() == 1);
    CHECK(v.channels[0].message_ids == std::vector<std::string>{"a", "z"});
  }

  TEST_CASE("build_model is total over generated and mutated inputs") {
    testing::Rng rng{11};
    for (int i = 0; i < 200; ++i) {
      auto m = testing::random_model(rng);
      if (!m.channels.empty() && i % 2 == 0)
        m.channels.front().to_subject = "Nobody";
      if (i % 3 == 0 && !m.subjects.empty())
        m.subjects.push_back(m.subjects.front());
      auto r = build_model(m);
      CHECK(r.ok() != !r.violations().empty());
    }
  }
}

TEST_SUITE("well_formed") {
  TEST_CASE("start action to end is clean") {
    auto m = fixtures::single_action();
    CHECK(well_formed(m).empty());
  }

  TEST_CASE("missing end flag") {
    auto m = fixtures::single_action();
    for (auto& st : m.subjects[0].behavior->states)
      st.is_end = false;
    auto vs = well_formed(m);
    CHECK(has_code(vs, "MissingEnd"));
    // The former end state now lacks its outgoing "done" transition.
    CHECK(has_code(vs, "TransitionShape"));
    CHECK(vs.size() == 2);
  }

  TEST_CASE("multiple start states") {
    auto m = fixtures::single_action();
    for (auto& st : m.subjects[0].behavior->states)
      st.is_start = true;
    CHECK(has_code(well_formed(m), "MultipleStart"));
  }

  TEST_CASE("transition shape") {
    auto m = fixtures::pingpong();
    auto& b = *m.subjects[0].behavior;
    // Timeout out of a send state, and an end state with a way out.
    b.transitions.push_back({"x", "a0", "a2", TransitionKind::Timeout, "", 5});
    b.transitions.push_back({"y", "a2", "a0", TransitionKind::Normal, "", 0});
    auto vs = well_formed(m);
    CHECK(has_code(vs, "TimeoutNotFromReceive"));
    CHECK(has_code(vs, "EndHasOutgoing"));
  }

  TEST_CASE("timeouts: negative duration and more than one") {
    auto m = fixtures::cyclic_wait(10);
    auto& b = *m.subjects[0].behavior;
    b.transitions.push_back({"tt", "a0", "a1", TransitionKind::Timeout, "", -1});
    auto vs = well_formed(m);
    CHECK(has_code(vs, "MultipleTimeout"));
    CHECK(has_code(vs, "NegativeTimeout"));
  }

  TEST_CASE("receive and action contents") {
    auto m = fixtures::pingpong();
    auto& b = *m.subjects[0].behavior;
    b.states[1].activity = ReceiveActivity{};
    b.states[2].is_end = false;
    b.states[2].activity = ActionActivity{{"x", "x"}};
    b.states.push_back({"a3", "", ActionActivity{{"done"}}, false, true});
    auto vs = well_formed(m);
    CHECK(has_code(vs, "EmptyReceive"));
    CHECK(has_code(vs, "DuplicateOutcome"));
  }

  TEST_CASE("transition to a deleted state is a dangling reference") {
    // Oracle: structural scan of the generator's own ground truth.
    testing::Rng rng{5};
    int checked = 0;
    for (int i = 0; i < 300 && checked < 100; ++i) {
      auto m = testing::random_model(rng);
      for (auto& s : m.subjects) {
        if (!s.behavior || s.behavior->states.size() < 3)
          continue;
        auto& b = *s.behavior;
        // Drop a non-start state that some transition enters.
        auto victim = std::find_if(b.transitions.begin(), b.transitions.end(),
                                   [&](const Transition& t) {
                                     return !b.find_state(t.to_state)->is_start;
                                   });
        if (victim == b.transitions.end())
          continue;
        auto gone = victim->to_state;
        std::erase_if(b.states, [&](const State& st) { return st.id == gone; });
        std::erase_if(b.transitions,
                      [&](const Transition& t) { return t.from_state == gone; });
        bool has_end = std::any_of(b.states.begin(), b.states.end(),
                                   [](const State& st) { return st.is_end; });
        auto vs = well_formed(m);
        std::size_t dangling = 0;
        for (auto& t : b.transitions)
          if (t.to_state == gone)
            ++dangling;
        std::size_t reported = 0;
        for (auto& v : vs)
          if (v.code == "DanglingReference" && v.subject == s.id)
            ++reported;
        CHECK(reported == dangling);
        CHECK(has_code(vs, "MissingEnd") == !has_end);
        ++checked;
        break;
      }
    }
    CHECK(checked >= 50);
  }

  TEST_CASE("checks are pure and sorted") {
    testing::Rng rng{9};
    for (int i = 0; i < 50; ++i) {
      auto m = testing::random_model(rng);
      m.subjects.back().behavior = Behavior{};
      if (m.subjects.back().kind == SubjectKind::External)
        continue;
      auto a = well_formed(m);
      CHECK(a == well_formed(m));
      CHECK(std::is_sorted(a.begin(), a.end()));
    }
  }
}

TEST_SUITE("interface_consistency") {
  TEST_CASE("ping-pong is clean") {
    CHECK(interface_consistency(fixtures::pingpong()).empty());
  }

  TEST_CASE("exhaustive cross-check on generated models") {
    // Oracle: every send/receive triple looked up in a flat triple set.
    testing::Rng rng{3};
    for (int i = 0; i < 100; ++i) {
      auto m = testing::random_model(rng);
      if (!m.channels.empty())
        m.channels.erase(m.channels.begin());
      std::set<std::tuple<std::string, std::string, std::string>> triples;
      for (auto& c : m.channels)
        for (auto& id : c.message_ids)
          triples.emplace(c.from_subject, c.to_subject, id);
      std::size_t sends = 0, receives = 0;
      std::set<std::tuple<std::string, std::string, std::string>> used;
      for (auto& s : m.subjects) {
        if (!s.behavior)
          continue;
        for (auto& st : s.behavior->states) {
          if (auto* x = std::get_if<SendActivity>(&st.activity)) {
            used.emplace(s.id, x->target_subject, x->message_id);
            if (!triples.count({s.id, x->target_subject, x->message_id}))
              ++sends;
          }
          if (auto* r = std::get_if<ReceiveActivity>(&st.activity))
            for (auto& b : r->branches)
              if (!triples.count({b.source_subject, s.id, b.message_id}))
                ++receives;
        }
      }
      std::size_t unused = 0;
      for (auto& t : triples) {
        auto* from = m.find_subject(std::get<0>(t));
        if (from->kind != SubjectKind::External && !used.count(t))
          ++unused;
      }
      auto vs = interface_consistency(m);
      auto count = [&](std::string_view code) {
        return static_cast<std::size_t>(
          std::count_if(vs.begin(), vs.end(),
                        [&](const Violation& v) { return v.code == code; }));
      };
      CHECK(count("UnmatchedSend") == sends);
      CHECK(count("UnmatchedReceive") == receives);
      CHECK(count("UnusedChannel") == unused);
    }
  }

  TEST_CASE("send without a channel") {
    auto m = fixtures::pingpong();
    m.channels.erase(m.channels.begin());
    auto vs = interface_consistency(m);
    CHECK(has_code(vs, "UnmatchedSend"));
    CHECK(has_code(vs, "UnmatchedReceive"));
  }

  TEST_CASE("channel nobody sends on is a warning") {
    auto m = fixtures::pingpong();
    m.messages.push_back({"extra", "extra", {}});
    m.channels[0].message_ids.push_back("extra");
    auto vs = interface_consistency(m);
    REQUIRE(vs.size() == 1);
    CHECK(vs[0].code == "UnusedChannel");
    CHECK(vs[0].severity == Severity::Warning);
    CHECK_FALSE(has_errors(vs));
  }
}

TEST_SUITE("drill_down") {
  TEST_CASE("standard subject") {
    auto m = fixtures::pingpong();
    CHECK(&drill_down(m, "A") == &*m.subjects[0].behavior);
  }

  TEST_CASE("external subject has no behavior") {
    auto m = fixtures::with_customer();
    CHECK_THROWS_WITH_AS(drill_down(m, "Customer"),
                         doctest::Contains("Customer"), Error);
    try {
      drill_down(m, "Customer");
    } catch (const Error& e) {
      CHECK(e.code() == "ExternalHasNoBehavior");
    }
  }

  TEST_CASE("unknown subject") {
    auto m = fixtures::pingpong();
    try {
      drill_down(m, "Nope");
      FAIL("expected UnknownSubject");
    } catch (const Error& e) {
      CHECK(e.code() == "UnknownSubject");
    }
  }
}
