#include <doctest.h>

#include <filesystem>

#include "fixtures.hpp"
#include "prepost/errors.hpp"
#include "prepost/trace.hpp"
#include "prepost/trace_io.hpp"

using namespace prepost;

namespace {

Value I(std::int64_t v) { return Value::of(v); }
Value N(std::string n) { return Value::of_name(std::move(n)); }
Value L(std::vector<Value> v) { return Value::of_list(std::move(v)); }

PreEvent pre(std::vector<PreOp> ops) { return PreEvent{std::move(ops)}; }
PreOp snd(std::string ch, Loc l) { return {PreOp::Kind::Send, std::move(ch), l}; }
PreOp rcv(std::string ch, Loc l) { return {PreOp::Kind::Recv, std::move(ch), l}; }

}  // namespace

TEST_SUITE("trace") {
  TEST_CASE("location-free encoding is the list encoding of the definition") {
    CHECK(encode(pre({snd("x", 1), rcv("y", 2)}), false) == L({I(0), L({N("x"), I(1)}), L({N("y"), I(0)})}));
    CHECK(encode(PostEvent{PostEvent::Kind::Send, "x", 1, 0}, false) == L({I(1), L({N("x"), I(1)})}));
    CHECK(encode(PostEvent{PostEvent::Kind::Recv, "x", 1, 3}, false) == L({I(1), L({N("x"), I(0), I(3)})}));
    CHECK(encode(pre({{PreOp::Kind::Close, "x", 4}}), false) == L({I(0), L({N("x"), I(2)})}));
    CHECK(encode(pre({{PreOp::Kind::Default, "", 5}}), false) == L({I(0), L({I(0), I(3)})}));
    CHECK(encode(PostEvent{PostEvent::Kind::AsyncSend, "x", 1, 9}, false) == L({I(2), L({N("x"), I(1)}), I(9)}));
  }

  TEST_CASE("encoding with locations appends the location to each operation") {
    CHECK(encode(PostEvent{PostEvent::Kind::Recv, "x", 7, 3}) == L({I(1), L({N("x"), I(0), I(3), I(7)})}));
  }

  TEST_CASE("decode inverts encode") {
    const std::vector<LocalEvent> events = {
        pre({snd("x", 1), rcv("y", 2), {PreOp::Kind::Default, "", 3}}),
        PostEvent{PostEvent::Kind::Send, "x", 1, 0},
        PostEvent{PostEvent::Kind::Recv, "y", 2, 4},
        PostEvent{PostEvent::Kind::Recv, "y", 2, kClosedSenderTid},
        PostEvent{PostEvent::Kind::AsyncSend, "x", 1, 12},
        PostEvent{PostEvent::Kind::Select, "", 3, 0},
        pre({{PreOp::Kind::Close, "x", 8}}),
        PostEvent{PostEvent::Kind::Close, "x", 8, 0},
    };
    // Without locations only kinds, channels and partners survive.
    auto strip = [](LocalEvent ev) {
      if (auto* p = std::get_if<PreEvent>(&ev))
        for (PreOp& op : p->options) op.loc = 0;
      else
        std::get<PostEvent>(ev).loc = 0;
      return ev;
    };
    for (const LocalEvent& ev : events) {
      CHECK(decode(encode(ev)) == ev);
      CHECK(decode(encode(ev, false), false) == strip(ev));
    }
    CHECK_THROWS_AS(decode(I(3)), DecodeError);
    CHECK_THROWS_AS(decode(L({I(7)})), DecodeError);
    CHECK_THROWS_AS(decode(L({I(1), L({N("x"), I(9), I(1)})})), DecodeError);
  }

  TEST_CASE("validation") {
    SUBCASE("alternating pre and post is valid, a trailing pre dangles") {
      LocalTrace lt{1, false, {pre({snd("x", 1)}), PostEvent{PostEvent::Kind::Send, "x", 1, 0}, pre({rcv("x", 2)})}};
      CHECK_NOTHROW(validate(lt));
    }
    SUBCASE("two posts in a row") {
      LocalTrace lt{1, false, {pre({snd("x", 1)}), PostEvent{PostEvent::Kind::Send, "x", 1, 0},
                               PostEvent{PostEvent::Kind::Send, "x", 1, 0}}};
      CHECK_THROWS_AS(validate(lt), InconsistentTrace);
    }
    SUBCASE("post not offered by its pre") {
      LocalTrace lt{1, false, {pre({snd("x", 1)}), PostEvent{PostEvent::Kind::Recv, "x", 1, 2}}};
      CHECK_THROWS_AS(validate(lt), InconsistentTrace);
    }
    SUBCASE("tids must ascend") {
      TraceSet ts{{LocalTrace{2, false, {}}, LocalTrace{1, false, {}}}};
      CHECK_THROWS_AS(validate(ts), InconsistentTrace);
    }
  }

  TEST_CASE("normalization moves buffered sends into virtual traces") {
    SUBCASE("buffered2: the receive names the virtual sender") {
      const TraceSet raw = parse_trace_set(
          "T1: pre(x!@1); postA(x!@1~3); pre(x?@3); post(3#x?@3)\n"
          "T2: pre(x!@2)\n");
      const TraceSet ts = normalize_buffered(raw);
      CHECK(format_trace_set(ts) ==
            "T1: pre(x?@3); post(3#x?@3)\n"
            "T2: pre(x!@2)\n"
            "V3: pre(x!@1); post(x!@1)\n");
    }
    SUBCASE("traces without buffered sends are unchanged") {
      CHECK(normalize_buffered(fixtures::fig1()) == fixtures::fig1());
    }
    SUBCASE("each buffered send gets its own trace") {
      const TraceSet ts = normalize_buffered(parse_trace_set(
          "T1: pre(x!@2); postA(x!@2~3); pre(x?@3); post(4#x?@3)\n"
          "T2: pre(x!@1); postA(x!@1~4)\n"));
      REQUIRE(ts.threads.size() == 4);
      CHECK(ts.threads[2].is_virtual);
      CHECK(ts.threads[3].is_virtual);
    }
    SUBCASE("duplicate virtual ids are rejected") {
      CHECK_THROWS_AS(normalize_buffered(parse_trace_set("T1: pre(x!@1); postA(x!@1~3); pre(x!@2); postA(x!@2~3)\n")),
                      InconsistentTrace);
    }
  }

  TEST_CASE("trace file format") {
    CHECK(format_trace_set(TraceSet{{LocalTrace{1, false, {}}}}) == "T1:\n");
    CHECK(parse_trace_set("T1:\n") == TraceSet{{LocalTrace{1, false, {}}}});
    CHECK(format_event(pre({snd("x", 1), rcv("y", 2), {PreOp::Kind::Default, "", 3}})) == "pre(x!@1|y?@2|sel@3)");
    CHECK(format_event(PostEvent{PostEvent::Kind::Recv, "x", 4, 2}) == "post(2#x?@4)");
    CHECK(format_event(PostEvent{PostEvent::Kind::Close, "x", 4, 0}) == "post(close x@4)");

    SUBCASE("comments and blank lines are skipped") {
      CHECK(parse_trace_set("// header\n\nT1:\n") == TraceSet{{LocalTrace{1, false, {}}}});
    }
    SUBCASE("errors name the line") {
      try {
        parse_trace_set("T1:\nT2: post(x!@1); post(x!@1)\n");
        FAIL("expected an error");
      } catch (const TraceFormatError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
      }
      CHECK_THROWS_AS(parse_trace_set("X1: pre(x!@1)\n"), TraceFormatError);
      CHECK_THROWS_AS(parse_trace_set("T1: pre(x!@)\n"), TraceFormatError);
      CHECK_THROWS_AS(parse_trace_set("T2:\nT1:\n"), TraceFormatError);
    }
  }

  TEST_CASE("file round trip on every corpus run") {
    const auto path = std::filesystem::temp_directory_path() / "prepost_trace_roundtrip.trace";
    for (const CorpusProgram& c : corpus()) {
      for (std::uint64_t seed = 0; seed < 10; ++seed) {
        CAPTURE(c.name);
        const Recording rec = fixtures::corpus_run(c.name, seed);
        for (const TraceSet* ts : {&rec.raw, &rec.traces}) {
          write_trace_file(*ts, path);
          CHECK(read_trace_file(path) == *ts);
          CHECK(format_trace_set(parse_trace_set(format_trace_set(*ts))) == format_trace_set(*ts));
        }
      }
    }
    std::filesystem::remove(path);
  }
}
