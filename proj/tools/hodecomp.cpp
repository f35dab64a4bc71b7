#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "hodecomp/corpus.hpp"
#include "hodecomp/optimize.hpp"
#include "hodecomp/program.hpp"
#include "hodecomp/semantics.hpp"
#include "hodecomp/syntax.hpp"

using namespace hodecomp;

namespace {

constexpr int kPass = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A path, or the name of an embedded corpus entry prefixed with "corpus:".
std::string source_text(const std::string& arg) {
  if (arg.rfind("corpus:", 0) == 0) {
    const CorpusEntry* e = find_corpus_entry(arg.substr(7));
    if (!e) throw UsageError("no corpus entry " + arg.substr(7));
    return e->text;
  }
  return read_file(arg);
}

Program load(const std::string& arg) {
  Program p = load_program(source_text(arg));
  return p;
}

Program load_process(const std::string& arg) {
  Program p = load(arg);
  if (!p.source) throw UsageError(arg + " has no main process");
  return p;
}

class Output {
public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw UsageError("cannot write " + path);
    }
  }
  std::ostream& os() { return file_ ? *file_ : std::cout; }

private:
  std::unique_ptr<std::ofstream> file_;
};

void print_verdicts(std::ostream& os, const std::vector<Verdict>& vs) {
  for (auto& v : vs) {
    os << (v.pass ? "PASS " : "FAIL ") << v.label;
    if (!v.detail.empty()) os << ": " << v.detail;
    os << "\n";
  }
}

struct Options {
  std::string file;
  std::string opt = "none";
  std::string policy = "det";
  std::string trace;
  std::string out;
  int fuel = 200;
  bool decomposed = false;
  bool annotations = false;
  std::vector<std::string> entries;
  bool list = false;
};

int cmd_parse(const Options& o) {
  Program p = load(o.file);
  Output out(o.out);
  if (p.file.main) out.os() << print_pretty(p.file.main, {o.annotations}) << "\n";
  if (p.file.namepass) out.os() << "-- encoded\n" << print_pretty(p.source, {o.annotations}) << "\n";
  return kPass;
}

int cmd_check(const Options& o) {
  Program p = load_process(o.file);
  CheckResult r = check_process(source_envs(p.env), p.source);
  Output out(o.out);
  out.os() << (r.ok ? "well-typed" : "ill-typed") << "\n";
  for (auto& d : r.diagnostics) out.os() << to_string(d) << "\n";
  return r.ok ? kPass : kFail;
}

int cmd_decompose(const Options& o) {
  Program p = load_process(o.file);
  Opt opt = parse_opt(o.opt);
  Built b = build(p, opt);
  CheckResult m = check_minimal_typed(b.term, b.envs);
  Output out(o.out);
  out.os() << print_pretty(b.term, {o.annotations}) << "\n";
  std::cerr << "degree " << b.degree << "\n";
  std::cerr << (m.ok ? "minimal" : "not minimal") << "\n";
  for (auto& d : m.diagnostics) std::cerr << to_string(d) << "\n";
  return m.ok ? kPass : kFail;
}

int cmd_run(const Options& o) {
  Program p = load_process(o.file);
  ProcP term = o.decomposed ? build(p, parse_opt(o.opt)).term : p.source;
  Policy policy = o.policy == "all" ? Policy::Exhaustive : Policy::Deterministic;
  Trace t = run(term, policy, o.fuel);
  if (!o.trace.empty()) {
    std::ofstream tf(o.trace);
    if (!tf) throw UsageError("cannot write " + o.trace);
    tf << trace_jsonl(t);
  }
  Output out(o.out);
  if (policy == Policy::Deterministic) {
    for (auto& s : t.steps) {
      out.os() << s.index << " " << to_string(s.redex.rule);
      for (auto& x : s.redex.participants) out.os() << " " << x;
      out.os() << "\n";
    }
    out.os() << to_string(t.terminal) << " after " << t.steps.size() << " steps\n";
    out.os() << print_pretty(normalize(t.final), {o.annotations}) << "\n";
  } else {
    out.os() << t.terminals.size() << " terminal states, " << to_string(t.terminal) << "\n";
    for (auto& q : t.terminals) out.os() << print(q, {o.annotations}) << "\n";
  }
  return t.terminal == Terminal::Stuck ? kFail : kPass;
}

int cmd_compare(const Options& o) {
  Program p = load_process(o.file);
  Built b = build(p, parse_opt(o.opt));
  Trace src = run(p.source, Policy::Deterministic, o.fuel);
  Trace dec = run(b.term, Policy::Deterministic, o.fuel);
  Output out(o.out);
  out.os() << fmt::format("source        {:>5} steps  {}\n", src.steps.size(), to_string(src.terminal));
  out.os() << fmt::format("decomposition {:>5} steps  {}\n", dec.steps.size(), to_string(dec.terminal));
  std::vector<Verdict> vs;
  for (auto& v : check_program(p, Opt::None))
    if (v.label.find("reaches") != std::string::npos || v.label.find("inert") != std::string::npos) vs.push_back(v);
  print_verdicts(out.os(), vs);
  bool agree = src.terminal == dec.terminal;
  return agree && all_pass(vs) ? kPass : kFail;
}

int cmd_verify(const Options& o) {
  Program p = load(o.file);
  auto vs = check_program(p, parse_opt(o.opt));
  Output out(o.out);
  print_verdicts(out.os(), vs);
  return all_pass(vs) ? kPass : kFail;
}

int cmd_corpus(const Options& o) {
  Output out(o.out);
  if (o.list) {
    for (auto& e : corpus()) out.os() << fmt::format("{:<18} {}\n", e.name, e.title);
    return kPass;
  }
  std::vector<const CorpusEntry*> es;
  if (o.entries.empty()) {
    for (auto& e : corpus()) es.push_back(&e);
  } else {
    for (auto& n : o.entries) {
      const CorpusEntry* e = find_corpus_entry(n);
      if (!e) throw UsageError("no corpus entry " + n);
      es.push_back(e);
    }
  }
  std::vector<Opt> opts;
  if (o.opt == "all") opts = {Opt::None, Opt::Duos, Opt::Monadic};
  else opts = {parse_opt(o.opt)};
  bool ok = true;
  for (auto* e : es) {
    Program p = load_program(e->text);
    for (Opt opt : opts) {
      auto vs = check_program(p, opt);
      bool pass = all_pass(vs);
      ok = ok && pass;
      out.os() << fmt::format("{:<18} --opt {:<8} {}\n", e->name, to_string(opt), pass ? "PASS" : "FAIL");
      for (auto& v : vs) {
        out.os() << "    " << (v.pass ? "PASS " : "FAIL ") << v.label;
        if (!v.pass && !v.detail.empty()) out.os() << ": " << v.detail;
        out.os() << "\n";
      }
    }
  }
  return ok ? kPass : kFail;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decomposition of higher-order session processes into minimal trios"};
  app.require_subcommand(1);
  Options o;

  auto file_arg = [&](CLI::App* c) {
    c->add_option("file", o.file, "source file, '-' for stdin, or corpus:NAME")->required();
    c->add_option("--out", o.out, "write the result to this path");
  };
  auto opt_flag = [&](CLI::App* c) {
    c->add_option("--opt", o.opt, "optimization")->check(CLI::IsMember({"none", "duos", "monadic"}));
  };

  auto* parse = app.add_subcommand("parse", "parse and print the main process");
  file_arg(parse);
  parse->add_flag("--annotations", o.annotations, "print type annotations");

  auto* check = app.add_subcommand("check", "type check the main process");
  file_arg(check);

  auto* dec = app.add_subcommand("decompose", "print the decomposition and its minimality verdict");
  file_arg(dec);
  opt_flag(dec);
  dec->add_flag("--annotations", o.annotations, "print type annotations");

  auto* runc = app.add_subcommand("run", "reduce the main process or its decomposition");
  file_arg(runc);
  opt_flag(runc);
  runc->add_option("--policy", o.policy, "scheduling policy")->check(CLI::IsMember({"det", "all"}));
  runc->add_option("--fuel", o.fuel, "step bound")->check(CLI::PositiveNumber);
  runc->add_option("--trace", o.trace, "write a line-delimited JSON trace");
  runc->add_flag("--decomposed", o.decomposed, "run the decomposition instead of the source");
  runc->add_flag("--annotations", o.annotations, "print type annotations");

  auto* cmp = app.add_subcommand("compare", "run source and decomposition side by side");
  file_arg(cmp);
  opt_flag(cmp);
  cmp->add_option("--fuel", o.fuel, "step bound")->check(CLI::PositiveNumber);

  auto* ver = app.add_subcommand("verify", "check every expectation in a source file");
  file_arg(ver);
  opt_flag(ver);

  auto* corp = app.add_subcommand("corpus", "replay the embedded examples");
  corp->add_option("entries", o.entries, "entry names (default: all)");
  corp->add_option("--opt", o.opt, "optimization, or 'all'")->check(CLI::IsMember({"none", "duos", "monadic", "all"}));
  corp->add_flag("--list", o.list, "list the entries");
  corp->add_option("--out", o.out, "write the report to this path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*parse) return cmd_parse(o);
    if (*check) return cmd_check(o);
    if (*dec) return cmd_decompose(o);
    if (*runc) return cmd_run(o);
    if (*cmp) return cmd_compare(o);
    if (*ver) return cmd_verify(o);
    if (*corp) return cmd_corpus(o);
  } catch (const ParseError& e) {
    std::cerr << o.file << ":" << e.what() << "\n";
    return kUsage;
  } catch (const UsageError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
  return kUsage;
}
