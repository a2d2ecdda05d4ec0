#include <doctest.h>

#include "fixtures.hpp"
#include "prepost/depgraph.hpp"
#include "prepost/trace_io.hpp"
#include "prepost/vclock.hpp"

using namespace prepost;

namespace {

const ClockedEvent& at(const ClockAssignment& ca, Loc loc) {
  for (const ClockedEvent& e : ca.events)
    if (e.event.loc == loc) return e;
  throw Error("no clocked event at " + std::to_string(loc));
}

}  // namespace

TEST_SUITE("vclock") {
  TEST_CASE("increment") {
    CHECK(vc_inc({0, 0}, 1) == VectorClock{0, 1});
    CHECK(vc_inc({0, 0}, 0) == VectorClock{1, 0});
    const VectorClock cs{3, 1, 4};
    CHECK(vc_inc(vc_inc(cs, 2), 2)[2] == cs[2] + 2);
    CHECK_THROWS_AS(vc_inc({0}, 1), Error);
  }

  TEST_CASE("maximum") {
    CHECK(vc_max({1, 0}, {0, 2}) == VectorClock{1, 2});
    const VectorClock cs{2, 5, 1};
    CHECK(vc_max(cs, cs) == cs);
    CHECK(vc_max(cs, {0, 0, 0}) == cs);
    CHECK_THROWS_AS(vc_max({1}, {1, 2}), Error);
  }

  TEST_CASE("strict order") {
    CHECK(vc_less({1, 0}, {1, 1}));
    CHECK_FALSE(vc_less({1, 0}, {0, 1}));
    CHECK_FALSE(vc_less({0, 1}, {1, 0}));
    CHECK_FALSE(vc_less({1, 1}, {1, 1}));
  }

  TEST_CASE("a single sync gives both sides the joined clock") {
    const ClockAssignment ca = assign_clocks(parse_trace_set("T1: pre(x?@2); post(2#x?@2)\nT2: pre(x!@1); post(x!@1)\n"));
    REQUIRE(ca.events.size() == 2);
    CHECK(ca.events[0].clock == VectorClock{1, 1});
    CHECK(ca.events[1].clock == VectorClock{1, 1});
    CHECK(ca.events[0].pair == ca.events[1].pair);
    CHECK(ca.events[0].pair != 0);
    CHECK(hb_by_clock(ca.events[0], ca.events[1]));
    CHECK_FALSE(hb_by_clock(ca.events[1], ca.events[0]));
  }

  TEST_CASE("fig1 clocks") {
    const ClockAssignment ca = assign_clocks(fixtures::fig1());
    CHECK(ca.complete);
    const ClockedEvent& r2 = at(ca, 2);
    for (Loc l : {3u, 1u}) CHECK(vc_less(at(ca, l).clock, r2.clock));
    CHECK(hb_by_clock(at(ca, 3), at(ca, 1)));
    CHECK(hb_by_clock(at(ca, 1), at(ca, 5)));
    CHECK_FALSE(hb_by_clock(at(ca, 5), at(ca, 1)));
    CHECK_FALSE(hb_by_clock(at(ca, 3), at(ca, 4)));
    CHECK_FALSE(hb_by_clock(at(ca, 4), at(ca, 3)));
    CHECK_THROWS_AS(hb_by_clock(r2, r2), Error);
  }

  TEST_CASE("disjoint thread pairs are incomparable") {
    const ClockAssignment ca = assign_clocks(parse_trace_set(
        "T1: pre(x?@3); post(2#x?@3)\n"
        "T2: pre(x!@1); post(x!@1)\n"
        "T3: pre(y?@4); post(4#y?@4)\n"
        "T4: pre(y!@2); post(y!@2)\n"));
    CHECK_FALSE(hb_by_clock(at(ca, 1), at(ca, 2)));
    CHECK_FALSE(hb_by_clock(at(ca, 2), at(ca, 1)));
  }

  TEST_CASE("clocks from different assignments are not comparable") {
    const ClockAssignment a = assign_clocks(fixtures::fig1());
    const ClockAssignment b = assign_clocks(fixtures::fig1());
    CHECK(a.events.front().analysis != b.events.front().analysis);
    CHECK_THROWS_AS(hb_by_clock(a.events.front(), b.events.back()), Error);
  }

  TEST_CASE("close and default clocks") {
    const ClockAssignment ca = assign_clocks(parse_trace_set(
        "T1: pre(close x@3); post(close x@3); pre(y?@4|sel@5); post(sel@5)\n"
        "T2: pre(x!@1)\n"
        "T3: pre(x?@2); post(0#x?@2)\n"));
    CHECK(at(ca, 3).clock == VectorClock{1, 0, 0});
    CHECK(at(ca, 2).clock == VectorClock{1, 0, 1});
    CHECK(at(ca, 5).clock == VectorClock{2, 0, 0});
    CHECK(hb_by_clock(at(ca, 3), at(ca, 2)));
  }

  TEST_CASE("clock order agrees with the graph on the corpus") {
    for (const CorpusProgram& c : corpus()) {
      for (std::uint64_t seed = 0; seed < 10; ++seed) {
        CAPTURE(c.name);
        CAPTURE(seed);
        const TraceSet ts = fixtures::corpus_run(c.name, seed).traces;
        CHECK(clock_relation(assign_clocks(ts)) == hb_relation(build_graph(ts)));
      }
    }
  }
}
