#include <doctest.h>

#include <algorithm>
#include <memory>

#include "fixtures.hpp"
#include "prepost/interpreter.hpp"
#include "prepost/parser.hpp"

using namespace prepost;

namespace {

Config start(std::string_view src) { return initial_config(std::make_shared<const Program>(parse_program(src))); }

bool communicates(StepChoice::Kind k) {
  return k == StepChoice::Kind::Sync || k == StepChoice::Kind::BufferedSend || k == StepChoice::Kind::BufferedRecv ||
         k == StepChoice::Kind::RecvClosed || k == StepChoice::Kind::Default || k == StepChoice::Kind::CrashSend;
}

// Applies non-communicating steps, first enabled first, until none is left.
void settle(Config& cfg) {
  for (;;) {
    const auto steps = enabled_steps(cfg);
    auto it = std::find_if(steps.begin(), steps.end(), [](const StepChoice& c) { return !communicates(c.kind); });
    if (it == steps.end()) return;
    apply_step(cfg, *it);
  }
}

std::size_t count_kind(const std::vector<StepChoice>& steps, StepChoice::Kind k) {
  return static_cast<std::size_t>(std::count_if(steps.begin(), steps.end(), [&](const StepChoice& c) { return c.kind == k; }));
}

}  // namespace

TEST_SUITE("interpreter") {
  TEST_CASE("a lone assignment is the only enabled step") {
    const Config cfg = start("x := 1");
    const auto steps = enabled_steps(cfg);
    REQUIRE(steps.size() == 1);
    CHECK(steps[0].kind == StepChoice::Kind::Local);
  }

  TEST_CASE("two receivers on an empty synchronous channel deadlock") {
    Config cfg = start("x := makeChan\ngo { a := <-x }\nb := <-x");
    settle(cfg);
    CHECK(cfg.threads.size() == 2);
    CHECK(enabled_steps(cfg).empty());
  }

  TEST_CASE("go allocates the next thread id") {
    Config cfg = start("go { x := 1 }");
    CHECK(cfg.next_tid == 2);
    apply_step(cfg, enabled_steps(cfg).at(0));
    REQUIRE(cfg.threads.size() == 2);
    CHECK(cfg.threads[1].tid == 2);
    CHECK(cfg.next_tid == 3);
  }

  TEST_CASE("a goroutine offers nothing before its start step") {
    Config cfg = start("x := makeChan\ngo { x <- 1 }\nselect {\ncase <-x:\ndefault:\n}");
    apply_step(cfg, enabled_steps(cfg).at(0));
    apply_step(cfg, enabled_steps(cfg).at(0));
    const auto before = enabled_steps(cfg);
    CHECK(count_kind(before, StepChoice::Kind::Start) == 1);
    CHECK(count_kind(before, StepChoice::Kind::Default) == 1);
    settle(cfg);
    const auto after = enabled_steps(cfg);
    CHECK(count_kind(after, StepChoice::Kind::Sync) == 1);
    CHECK(count_kind(after, StepChoice::Kind::Default) == 0);
  }

  TEST_CASE("sync binds the receiver and emits send then receive") {
    Config cfg = start("x := makeChan\ngo { x <- 1 }\ny := <-x");
    settle(cfg);
    const auto steps = enabled_steps(cfg);
    REQUIRE(steps.size() == 1);
    REQUIRE(steps[0].kind == StepChoice::Kind::Sync);
    const RunTimeTrace ev = apply_step(cfg, steps[0]);
    CHECK(cfg.state.value("y") == Value::of(1));
    CHECK(to_string(ev) == "2!x; 1?<2,x>");
  }

  TEST_CASE("buffered sends queue without a receive event and drain in order") {
    Config cfg = start("x := makeChan(cap 2)\nx <- 7\nx <- 8\na := <-x\nb := <-x");
    settle(cfg);
    RunTimeTrace all;
    for (int i = 0; i < 2; ++i) {
      const auto steps = enabled_steps(cfg);
      REQUIRE(steps.size() == 1);
      CHECK(steps[0].kind == StepChoice::Kind::BufferedSend);
      const RunTimeTrace ev = apply_step(cfg, steps[0]);
      CHECK(std::none_of(ev.begin(), ev.end(), [](const TraceEvent& e) { return e.kind == TraceEvent::Kind::Recv; }));
      all.insert(all.end(), ev.begin(), ev.end());
      settle(cfg);
    }
    const ChanState& ch = cfg.state.channel("x");
    REQUIRE(ch.buffer.size() == 2);
    CHECK(ch.buffer[0].value == Value::of(7));
    CHECK(ch.buffer[1].value == Value::of(8));
    for (int i = 0; i < 2; ++i) {
      const auto steps = enabled_steps(cfg);
      REQUIRE(steps.size() == 1);
      CHECK(steps[0].kind == StepChoice::Kind::BufferedRecv);
      apply_step(cfg, steps[0]);
      settle(cfg);
    }
    CHECK(cfg.state.value("a") == Value::of(7));
    CHECK(cfg.state.value("b") == Value::of(8));
  }

  TEST_CASE("newsreader agencies can each pair with either reader") {
    Config cfg = initial_config(std::make_shared<const Program>(fixtures::corpus_parsed("newsreader")));
    settle(cfg);
    const auto steps = enabled_steps(cfg);
    std::size_t r_pairs = 0;
    for (const StepChoice& c : steps) {
      if (c.kind != StepChoice::Kind::Sync) continue;
      const StepSignature sig = signature(cfg, c);
      if (sig.tid == 2) ++r_pairs;  // R is the first go statement
    }
    CHECK(r_pairs == 2);
    CHECK(count_kind(steps, StepChoice::Kind::Sync) == 4);
  }

  TEST_CASE("fig1 always completes with three synchronizations") {
    const Program p = fixtures::corpus_parsed("fig1");
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const RunResult r = run(p, seed);
      CHECK(r.status == RunStatus::Completed);
      CHECK(r.trace.size() == 6);
      CHECK(std::count_if(r.trace.begin(), r.trace.end(),
                          [](const TraceEvent& e) { return e.kind == TraceEvent::Kind::Send; }) == 3);
    }
  }

  TEST_CASE("newsreader deadlocks when the first reader takes both items") {
    const Program p = fixtures::corpus_parsed("newsreader");
    std::uint64_t seed = 0;
    RunResult r;
    for (; seed < 1000; ++seed) {
      r = run(p, seed);
      if (r.status == RunStatus::Deadlock) break;
    }
    REQUIRE(r.status == RunStatus::Deadlock);
    // Both agency items went to reader 1's helpers, main never received.
    std::size_t agency_sends = 0;
    for (const TraceEvent& e : r.trace) {
      CHECK_FALSE((e.kind == TraceEvent::Kind::Recv && e.tid == kMainTid));
      agency_sends += e.kind == TraceEvent::Kind::Send && (e.channel == "r" || e.channel == "b");
    }
    CHECK(agency_sends == 2);
  }

  TEST_CASE("empty program completes with an empty trace") {
    const RunResult r = run(Program{}, 3);
    CHECK(r.status == RunStatus::Completed);
    CHECK(r.trace.empty());
    CHECK(r.thread_count == 1);
  }

  TEST_CASE("runs are deterministic in the seed") {
    const Program p = fixtures::corpus_parsed("newsreader");
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const RunResult a = run(p, seed), b = run(p, seed);
      CHECK(a.trace == b.trace);
      CHECK(a.status == b.status);
      CHECK(a.schedule == b.schedule);
    }
  }

  TEST_CASE("closed channels") {
    SUBCASE("send on a closed channel crashes") {
      const RunResult r = run(parse_program("x := makeChan\nclose(x)\nx <- 1"), 0);
      CHECK(r.status == RunStatus::Crashed);
      CHECK_FALSE(r.diagnostic.empty());
    }
    SUBCASE("closing twice crashes") {
      CHECK(run(parse_program("x := makeChan\nclose(x)\nclose(x)"), 0).status == RunStatus::Crashed);
    }
    SUBCASE("receive on a closed channel yields the dummy sender") {
      const RunResult r = run(parse_program("x := makeChan\nclose(x)\ny := <-x"), 0);
      CHECK(r.status == RunStatus::Completed);
      CHECK(to_string(r.trace) == "1:close x; 1?<0,x>");
    }
  }

  TEST_CASE("default fires only when no case is ready") {
    const RunResult r = run(parse_program("x := makeChan\nselect {\ncase y := <-x:\ndefault:\n}"), 0);
    CHECK(r.status == RunStatus::Completed);
    CHECK(to_string(r.trace) == "1:sel");
  }

  TEST_CASE("step budget") {
    const RunResult r = run(fixtures::corpus_parsed("add_pipe"), 0, 5);
    CHECK(r.status == RunStatus::StepLimit);
    CHECK(r.steps == 5);
  }

  TEST_CASE("unbound channel is an evaluation error") {
    const RunResult r = run(parse_program("x <- 1"), 0);
    CHECK(r.status == RunStatus::Crashed);
  }
}
