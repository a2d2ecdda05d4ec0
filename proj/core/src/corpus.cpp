#include "prepost/corpus.hpp"

#include <algorithm>

#include "prepost/errors.hpp"

namespace prepost {

namespace {

constexpr std::string_view kNewsreader = R"(// Two readers race for one Reuters and one Bloomberg item.
// Each reader forwards both agencies into its own channel and takes one value,
// so a reader can swallow both items and starve the other: deadlock.
r := makeChan
b := makeChan
go {
  r <- 1          // r!
}
go {
  b <- 2          // b!
}
go {
  ch1 := makeChan // N1
  go {
    v1 := <-r     // N1.r?
    ch1 <- v1     // N1.ch!
  }
  go {
    w1 := <-b     // N1.b?
    ch1 <- w1     // N1.ch!
  }
  x1 := <-ch1     // N1.ch?
}
ch2 := makeChan   // N2
go {
  v2 := <-r       // N2.r?
  ch2 <- v2       // N2.ch!
}
go {
  w2 := <-b       // N2.b?
  ch2 <- w2       // N2.ch!
}
x2 := <-ch2       // N2.ch?
)";

constexpr std::string_view kNewsreaderFixed = R"(// Each reader consumes at most one item through a select.
r := makeChan
b := makeChan
go {
  r <- 1          // r!
}
go {
  b <- 2          // b!
}
go {
  select {        // N1
  case x1 := <-r:
  case x1 := <-b:
  }
}
select {          // N2
case x2 := <-r:
case x2 := <-b:
}
)";

constexpr std::string_view kFig1 = R"(// Two channels, four threads. Label comments give the conventional
// numbering of the six operations.
x := makeChan
y := makeChan
go {
  z := <-y        // label 6
}
go {
  y <- 1          // label 4
  x <- 1          // label 5
}
go {
  x <- 1          // label 3
}
a := <-x          // label 1
c := <-x          // label 2
)";

constexpr std::string_view kBufferedChan = R"(// Capacity-1 channel with two senders and one receive.
x := makeChan(cap 1)
go {
  x <- 1          // A1
}
x <- 1            // A2
<-x
)";

constexpr std::string_view kBuffered2 = R"(// B1 fills the buffer before B2's sender exists; B3 always takes B1.
x := makeChan(cap 1)
x <- 1            // B1
go {
  x <- 1          // B2
}
<-x               // B3
)";

constexpr std::string_view kSelDefault = R"(// The default case usually fires before A1 is ready.
x := makeChan
go {
  x <- 1          // A1
}
select {
case <-x:         // A3
default:
}
)";

constexpr std::string_view kClosedChan = R"(// Main closes x while A1 may still want to send on it.
x := makeChan
go {
  x <- 1          // A1
}
go {
  <-x             // B
}
close(x)
)";

std::vector<std::size_t> first_primes(std::size_t k) {
  std::vector<std::size_t> ps;
  for (std::size_t n = 2; ps.size() < k; ++n)
    if (std::none_of(ps.begin(), ps.end(), [n](std::size_t p) { return n % p == 0; })) ps.push_back(n);
  return ps;
}

std::vector<CorpusProgram> build_corpus() {
  return {
      {"newsreader", std::string(kNewsreader)},
      {"newsreader_fixed", std::string(kNewsreaderFixed)},
      {"fig1", std::string(kFig1)},
      {"add_pipe", add_pipe_source(5, 10)},
      {"primesieve", primesieve_source(5)},
      {"collector", collector_source(5)},
      {"buffered_chan", std::string(kBufferedChan)},
      {"buffered2", std::string(kBuffered2)},
      {"sel_default", std::string(kSelDefault)},
      {"closed_chan", std::string(kClosedChan)},
  };
}

}  // namespace

const std::vector<CorpusProgram>& corpus() {
  static const std::vector<CorpusProgram> programs = build_corpus();
  return programs;
}

const CorpusProgram& corpus_program(std::string_view name) {
  for (const CorpusProgram& p : corpus())
    if (p.name == name) return p;
  throw Error("no corpus program named '" + std::string(name) + "'");
}

std::string collector_source(std::size_t n) {
  std::string s = "// " + std::to_string(n) + " producers send once each on x; main collects every value.\n";
  s += "x := makeChan\n";
  for (std::size_t i = 0; i < n; ++i) s += "go {\n  x <- " + std::to_string(i) + "\n}\n";
  for (std::size_t i = 0; i < n; ++i) s += "<-x\n";
  return s;
}

std::string add_pipe_source(std::size_t stages, std::size_t messages) {
  std::string s = "// " + std::to_string(stages) + " forwarding stages, " + std::to_string(messages) +
                  " messages pushed through one at a time.\n";
  for (std::size_t i = 0; i <= stages; ++i) s += "c" + std::to_string(i) + " := makeChan\n";
  for (std::size_t i = 1; i <= stages; ++i) {
    const std::string in = "c" + std::to_string(i - 1);
    const std::string out = "c" + std::to_string(i);
    const std::string v = "n" + std::to_string(i);
    s += "go {\n";
    for (std::size_t m = 0; m < messages; ++m) s += "  " + v + " := <-" + in + "\n  " + out + " <- " + v + "\n";
    s += "}\n";
  }
  const std::string last = "c" + std::to_string(stages);
  for (std::size_t m = 1; m <= messages; ++m) s += "c0 <- " + std::to_string(m) + "\n<-" + last + "\n";
  return s;
}

std::string primesieve_source(std::size_t primes) {
  const std::vector<std::size_t> ps = first_primes(primes);
  std::string s = "// Sieve for the first " + std::to_string(primes) + " primes, unrolled.\n";
  s += "ch0 := makeChan\n";
  s += "go {\n";
  if (!ps.empty())
    for (std::size_t n = 2; n <= ps.back(); ++n) s += "  ch0 <- " + std::to_string(n) + "\n";
  s += "}\n";
  // Values still flowing on the current channel after its head was taken.
  std::vector<std::size_t> flow;
  if (!ps.empty())
    for (std::size_t n = 3; n <= ps.back(); ++n) flow.push_back(n);
  for (std::size_t k = 0; k < ps.size(); ++k) {
    const std::string in = "ch" + std::to_string(k);
    s += "p" + std::to_string(k + 1) + " := <-" + in + "\n";
    if (k + 1 == ps.size()) break;
    const std::string out = "ch" + std::to_string(k + 1);
    s += out + " := makeChan\n";
    s += "go {\n";
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < flow.size(); ++i) {
      const std::string t = "t" + std::to_string(k + 1) + "_" + std::to_string(i + 1);
      s += "  " + t + " := <-" + in + "\n";
      if (flow[i] % ps[k] != 0) {
        s += "  " + out + " <- " + t + "\n";
        kept.push_back(flow[i]);
      }
    }
    s += "}\n";
    flow.assign(kept.begin() + (kept.empty() ? 0 : 1), kept.end());
  }
  return s;
}

}  // namespace prepost
