#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "prepost/corpus.hpp"
#include "prepost/depgraph.hpp"
#include "prepost/errors.hpp"
#include "prepost/instrument.hpp"
#include "prepost/overhead.hpp"
#include "prepost/parser.hpp"
#include "prepost/report.hpp"
#include "prepost/trace_io.hpp"

namespace fs = std::filesystem;
using namespace prepost;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitInternal = 2;

/// Bad command-line or file input.
class InputError : public Error {
 public:
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw InputError("cannot open '" + out + "' for writing");
  f << text;
}

std::size_t parse_size(const std::string& s, const std::string& what) {
  std::size_t v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || end != s.data() + s.size()) throw InputError("bad " + what + " '" + s + "'");
  return v;
}

/// A program file, or a generator spec `collector:N`, `add_pipe:S:M`,
/// `primesieve:K`.
std::string program_text(const std::string& arg) {
  if (fs::exists(arg)) return read_file(arg);
  std::vector<std::string> parts;
  std::stringstream ss(arg);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() == 2 && parts[0] == "collector") return collector_source(parse_size(parts[1], "thread count"));
  if (parts.size() == 2 && parts[0] == "primesieve") return primesieve_source(parse_size(parts[1], "prime count"));
  if (parts.size() == 3 && parts[0] == "add_pipe")
    return add_pipe_source(parse_size(parts[1], "stage count"), parse_size(parts[2], "message count"));
  throw InputError("cannot open '" + arg + "'");
}

struct Options {
  std::string input;
  std::string out;
  std::uint64_t seed = 0;
  std::size_t max_steps = kDefaultMaxSteps;
  std::size_t max_schedules = kDefaultMaxSchedules;
  std::size_t max_states = kDefaultMaxStates;
  std::string format = "text";
};

int cmd_run(const Options& o) {
  const Program p = parse_program(program_text(o.input));
  const Recording rec = record(p, o.seed, o.max_steps);
  std::cout << "status: " << to_string(rec.result.status) << "\n"
            << "seed: " << o.seed << "\n"
            << "threads: " << rec.result.thread_count << "\n"
            << "steps: " << rec.result.steps << "\n"
            << "trace length: " << rec.actual.size() << "\n"
            << "trace: " << to_string(rec.actual) << "\n";
  if (!rec.result.diagnostic.empty()) std::cout << "diagnostic: " << rec.result.diagnostic << "\n";
  if (o.out.empty()) std::cout << "\n";
  emit(format_trace_set(rec.raw), o.out);
  return kExitOk;
}

int cmd_analyze(const Options& o) {
  const TraceSet ts = parse_trace_set(read_file(o.input));
  const AnalysisReport r = analyze(ts, {o.max_schedules, o.max_states});
  emit(o.format == "json" ? render_json(r) : render_text(r), o.out);
  return kExitOk;
}

int cmd_graph(const Options& o) {
  const TraceSet ts = normalize_buffered(parse_trace_set(read_file(o.input)));
  emit(to_dot(build_graph(ts, {o.max_schedules, o.max_states})), o.out);
  return kExitOk;
}

int cmd_bench(const Options& o) {
  const Program p = parse_program(program_text(o.input));
  emit(render_overhead(measure_overhead(p, o.seed, o.max_steps)), o.out);
  return kExitOk;
}

int cmd_corpus(const std::string& name, const std::string& out_dir) {
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    for (const CorpusProgram& c : corpus()) emit(c.source, (fs::path(out_dir) / (c.name + ".mp")).string());
    return kExitOk;
  }
  if (name.empty()) {
    for (const CorpusProgram& c : corpus()) std::cout << c.name << "\n";
    return kExitOk;
  }
  std::cout << corpus_program(name).source;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pre/post trace analysis for channel programs"};
  app.require_subcommand(1);
  Options o;
  std::string corpus_name;
  std::string corpus_dir;

  auto add_common = [&](CLI::App* sub, const std::string& what) {
    sub->add_option("input", o.input, what)->required();
    sub->add_option("--out", o.out, "Write output to this file instead of stdout");
  };
  auto add_caps = [&](CLI::App* sub) {
    sub->add_option("--max-schedules", o.max_schedules, "Schedule enumeration cap")->check(CLI::PositiveNumber);
    sub->add_option("--max-states", o.max_states, "Replay state cap")->check(CLI::PositiveNumber);
  };
  auto add_exec = [&](CLI::App* sub) {
    sub->add_option("--seed", o.seed, "Scheduler seed");
    sub->add_option("--max-steps", o.max_steps, "Step budget")->check(CLI::PositiveNumber);
  };

  CLI::App* run = app.add_subcommand("run", "Instrument and run a program, write its local traces");
  add_common(run, "Program file or generator spec");
  add_exec(run);
  CLI::App* an = app.add_subcommand("analyze", "Replay and graph analysis of a trace file");
  add_common(an, "Trace file");
  add_caps(an);
  an->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"text", "json"}));
  CLI::App* graph = app.add_subcommand("graph", "Dependency graph of a trace file as DOT");
  add_common(graph, "Trace file");
  add_caps(graph);
  CLI::App* bench = app.add_subcommand("bench", "Tracing overhead of pre/post versus vector clocks");
  add_common(bench, "Program file or generator spec (collector:N, add_pipe:S:M, primesieve:K)");
  add_exec(bench);
  CLI::App* corp = app.add_subcommand("corpus", "List, print or write the bundled programs");
  corp->add_option("name", corpus_name, "Program to print");
  corp->add_option("--out-dir", corpus_dir, "Write every program as <name>.mp into this directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*run) return cmd_run(o);
    if (*an) return cmd_analyze(o);
    if (*graph) return cmd_graph(o);
    if (*bench) return cmd_bench(o);
    return cmd_corpus(corpus_name, corpus_dir);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const TraceFormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ReservedNameError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}
