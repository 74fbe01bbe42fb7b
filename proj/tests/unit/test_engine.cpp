#include "doctest.h"

#include "vcsim/chain.hpp"
#include "vcsim/engine.hpp"
#include "vcsim/error.hpp"
#include "vcsim/io.hpp"

#include <cmath>

using namespace vcsim;

TEST_CASE("schedule on an empty queue fires at t=0") {
  Engine e(10.0);
  e.schedule(0.0, "a", "x");
  auto ev = e.advance();
  REQUIRE(ev);
  CHECK(ev->fire_time == 0.0);
}

TEST_CASE("simultaneous events dequeue in insertion order") {
  EventQueue q;
  q.schedule(0.0, 3.0, "A", "x");
  q.schedule(0.0, 3.0, "B", "x");
  CHECK(q.pop().target.str() == "A");
  CHECK(q.pop().target.str() == "B");
}

TEST_CASE("scheduling in the past is a hard error") {
  Engine e(10.0);
  e.schedule(5.0, "a", "x");
  e.advance();
  REQUIRE(e.now() == 5.0);
  try {
    e.schedule(2.0, "a", "x");
    FAIL("expected past_event");
  } catch (const InvariantViolation &err) {
    CHECK(err.code() == "past_event");
    CHECK(std::string(err.what()).find("past event") != std::string::npos);
  }
}

TEST_CASE("advance extracts the minimum and moves the clock") {
  Engine e(10.0);
  e.schedule(4.0, "Y", "x");
  e.schedule(1.0, "X", "x");
  auto ev = e.advance();
  REQUIRE(ev);
  CHECK(ev->target.str() == "X");
  CHECK(ev->fire_time == 1.0);
  CHECK(e.now() == 1.0);
}

TEST_CASE("equal fire times break ties on sequence number") {
  EventQueue q;
  for (int i = 0; i < 3; ++i)
    q.schedule(0.0, 10.0, "filler", "x"); // seq 0..2
  q.schedule(0.0, 2.0, "B", "x");         // seq 3
  for (int i = 0; i < 3; ++i)
    q.schedule(0.0, 10.0, "filler", "x"); // seq 4..6
  q.schedule(0.0, 2.0, "A", "x");         // seq 7
  const Event first = q.pop();
  CHECK(first.target.str() == "B");
  CHECK(first.sequence_no == 3);
  CHECK(q.pop().sequence_no == 7);
}

TEST_CASE("advance on an empty queue signals exhaustion") {
  Engine e(10.0);
  CHECK_FALSE(e.advance().has_value());
}

TEST_CASE("periodic activations start one interval in") {
  SUBCASE("2 h over 48 h") {
    Engine e(48.0);
    e.register_periodic("retailer", "activate-deliver", 2.0);
    auto trace = e.run_until(48.0, [](const Event &) {});
    REQUIRE(trace.size() == 24);
    for (std::size_t i = 0; i < trace.size(); ++i)
      CHECK(trace[i].fire_time == 2.0 * static_cast<double>(i + 1));
  }
  SUBCASE("4 h over 48 h") {
    Engine e(48.0);
    e.register_periodic("supplier1", "activate-deliver", 4.0);
    auto trace = e.run_until(48.0, [](const Event &) {});
    REQUIRE(trace.size() == 12);
    CHECK(trace.front().fire_time == 4.0);
    CHECK(trace.back().fire_time == 48.0);
  }
  SUBCASE("zero interval") {
    Engine e(48.0);
    CHECK_THROWS_AS(e.register_periodic("a", "x", 0.0), ConfigError);
  }
}

TEST_CASE("periodic count is floor(T / interval)") {
  CHECK(periodic_activation_count(2.5, 48.0) == 19);
  CHECK(periodic_activation_count(3.0, 48.0) == 16);
  CHECK(periodic_activation_count(6.0, 48.0) == 8);
  CHECK(periodic_activation_count(12.0, 48.0) == 4);
  CHECK(periodic_activation_count(50.0, 48.0) == 0);
  CHECK_THROWS_AS(periodic_activation_count(-1.0, 48.0), ConfigError);
}

TEST_CASE("run_until stops at t_end") {
  Engine e(48.0);
  e.register_periodic("r", "x", 2.5);
  e.schedule(49.0, "late", "x");
  auto trace = e.run_until(48.0, [](const Event &) {});
  CHECK(trace.back().fire_time <= 48.0);
  CHECK(e.pending() == 1);
}

TEST_CASE("run_until with nothing at t=0 returns an empty trace") {
  Engine e(0.0);
  e.schedule(1.0, "a", "x");
  CHECK(e.run_until(0.0, [](const Event &) {}).empty());
}

TEST_CASE("handlers may schedule follow-up events at the current time") {
  Engine e(5.0);
  e.schedule(1.0, "a", "first");
  std::vector<std::string> seen;
  e.run_until(5.0, [&](const Event &ev) {
    seen.push_back(ev.kind);
    if (ev.kind == "first")
      e.schedule_in(0.0, "a", "second");
  });
  CHECK(seen == std::vector<std::string>{"first", "second"});
}

TEST_CASE("negative horizon is a configuration error") {
  CHECK_THROWS_AS(Engine(-1.0), ConfigError);
}

TEST_CASE("substreams are independent of draw interleaving") {
  RandomStreams a(42), b(42);
  std::vector<double> xa, xb;
  for (int i = 0; i < 5; ++i) {
    xa.push_back(a.stream("firm/deliver").uniform());
    a.stream("retailer/deliver").uniform();
  }
  for (int i = 0; i < 5; ++i)
    xb.push_back(b.stream("firm/deliver").uniform());
  CHECK(xa == xb);
  CHECK(RandomStreams(42).stream("x").uniform() != RandomStreams(43).stream("x").uniform());
}

TEST_CASE("uniform draws stay in range") {
  RandomStream s(7);
  for (int i = 0; i < 10000; ++i) {
    const double u = s.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    const double v = s.uniform_open_closed();
    CHECK((v > 0.0 && v <= 1.0));
  }
}

TEST_CASE("uniform draw is the top 53 bits of the generator") {
  std::mt19937_64 gen(RandomStreams::derive_seed(99, "s"));
  const double expected = static_cast<double>(gen() >> 11) / 9007199254740992.0;
  CHECK(RandomStreams(99).stream("s").uniform() == expected);
}

TEST_CASE("payload digest is the FNV-1a hash of the decimal payload") {
  Event e;
  e.payload = 12;
  CHECK(e.payload_digest() == hex64(fnv1a64("12")));
  CHECK(hex64(fnv1a64("")) == "cbf29ce484222325");
}

TEST_CASE("case-study traces are identical across runs") {
  const Scenario s = case_study_profile(RunMode::kVcor);
  const auto a = run_scenario(s);
  const auto b = run_scenario(s);
  CHECK(trace_jsonl(a.artifacts) == trace_jsonl(b.artifacts));
  CHECK_FALSE(a.artifacts.trace.empty());
  for (std::size_t i = 1; i < a.artifacts.trace.size(); ++i) {
    const auto &p = a.artifacts.trace[i - 1];
    const auto &c = a.artifacts.trace[i];
    CHECK((p.fire_time < c.fire_time ||
           (p.fire_time == c.fire_time && p.sequence_no < c.sequence_no)));
  }
}
