// Acceptance gate: one PASS/FAIL line per criterion.
//
// Usage: hodecomp_acceptance [--expect-fail N]...
// Exit status is 0 when exactly the listed criteria fail.

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "hodecomp/corpus.hpp"
#include "hodecomp/generate.hpp"
#include "hodecomp/optimize.hpp"
#include "hodecomp/program.hpp"
#include "hodecomp/semantics.hpp"
#include "hodecomp/types.hpp"

using namespace hodecomp;

namespace {

// Pinned thresholds. Every comparison below is exact.
constexpr std::size_t kGenerated = 200;     // random processes for criterion 3
constexpr std::uint64_t kGenSeed = 1;       // first generator seed
constexpr int kGenDepth = 5;                // maximum nesting of generated processes
constexpr int kReductionFuel = 50;          // exhaustive depth for criterion 5
constexpr int kInertFuel = 1000;            // deterministic bound for criterion 6
constexpr double kRuntimeBudgetSeconds = 60; // whole gate

struct Item {
  std::string what;
  bool pass;
  std::string detail;
};

struct Criterion {
  int id;
  std::string title;
  std::vector<Item> items;
  std::vector<std::string> notes;
  bool pass() const {
    for (auto& i : items)
      if (!i.pass) return false;
    return !items.empty();
  }
};

TypeP T(const char* s) { return parse_type(s); }

TypeList L(std::initializer_list<const char*> ts) {
  TypeList out;
  for (auto t : ts) out.push_back(T(t));
  return out;
}

std::string show_list(const TypeList& ts) {
  std::string s = "[";
  for (std::size_t i = 0; i < ts.size(); ++i) s += (i ? ", " : "") + show(ts[i]);
  return s + "]";
}

Item list_item(const std::string& what, const TypeList& got, const TypeList& want) {
  bool ok = type_equal(got, want);
  return {what, ok, ok ? "" : "got " + show_list(got)};
}

Item int_item(const std::string& what, long got, long want) {
  return {what, got == want, got == want ? "" : fmt::format("got {}, expected {}", got, want)};
}

Program entry(const char* name) { return load_program(find_corpus_entry(name)->text); }

Criterion types() {
  Criterion c{1, "type decomposition exactness", {}, {}};
  TypeList rec3 = L({"rec t . ?<Int>;t", "rec t . ?<Bool>;t", "rec t . !<Bool>;t"});
  c.items.push_back(list_item("gdecomp(?Int;?Int;!Bool;end)", gdecomp(T("?<Int>;?<Int>;!<Bool>;end")),
                              L({"?<Int>;end", "?<Int>;end", "!<Bool>;end"})));
  c.items.push_back(list_item("gdecomp(rec t.?Int;?Bool;!Bool;t)", gdecomp(T("rec t . ?<Int>;?<Bool>;!<Bool>;t")), rec3));
  c.items.push_back(list_item("rsdecomp(?Bool;!Bool;rec t.?Int;?Bool;!Bool;t)",
                              rsdecomp(T("?<Bool>;!<Bool>;rec t . ?<Int>;?<Bool>;!<Bool>;t")), rec3));
  c.items.push_back(int_item("findex(rec t.?Int;?Bool;!Bool;t)", findex(T("rec t . ?<Int>;?<Bool>;!<Bool>;t")), 1));
  c.items.push_back(
      int_item("findex(?Bool;!Bool;rec t.?Int;?Bool;!Bool;t)", findex(T("?<Bool>;!<Bool>;rec t . ?<Int>;?<Bool>;!<Bool>;t")), 2));
  return c;
}

long macro_degree(const Program& p, const std::string& name) {
  if (name == "main") return degree(p.source);
  for (auto& [n, v] : p.file.values)
    if (n == name) return degree_val(v);
  for (auto& [n, q] : p.file.procs)
    if (n == name) return degree(q);
  return -1;
}

Criterion degrees() {
  Criterion c{2, "degree exactness", {}, {}};
  struct Want {
    const char* entry;
    const char* macro;
    long degree;
  };
  const Want wants[] = {
      {"boolean-exchange", "V", 2},  {"boolean-exchange", "Wp", 2}, {"boolean-exchange", "W", 4},
      {"boolean-exchange", "Q", 9},  {"boolean-exchange", "R", 9},  {"boolean-exchange", "main", 19},
      {"math-server", "Q", 1},       {"math-server", "R", 4},       {"math-server", "main", 6},
      {"recursion", "main", 7},      {"recursion", "V", 0},
  };
  std::map<std::string, Program> progs;
  for (auto& w : wants) {
    if (!progs.count(w.entry)) progs.emplace(w.entry, entry(w.entry));
    c.items.push_back(int_item(fmt::format("{} |{}|", w.entry, w.macro), macro_degree(progs.at(w.entry), w.macro), w.degree));
  }
  c.notes.push_back("recursion |main|: the clause table gives 1 (input) + 1 (output of a variable) + 1 (parallel)");
  c.notes.push_back("  + 1 (application of the shared V, |V| = 0) + 2 (output of the shared V, |V| = 0, then 0) = 6.");
  c.notes.push_back("  The target 7 matches a decomposition that also spends an index on the shared value sent");
  c.notes.push_back("  on the session (its printed output on s1 is followed by propagator 7, leaving 6 unused),");
  c.notes.push_back("  which contradicts |V| = 0 for shared abstractions. The literal table is kept.");
  return c;
}

Criterion minimality() {
  Criterion c{3, "minimal typability and propagator accounting", {}, {}};
  int corpus_ok = 0, corpus_n = 0;
  std::string corpus_fail;
  for (auto& e : corpus()) {
    Program prog = load_program(e.text);
    if (!prog.source) continue;
    ++corpus_n;
    Built b = build(prog, Opt::None);
    CheckResult m = check_minimal_typed(b.term, b.envs);
    bool acc = propagator_accounting(prog.source, b.term);
    if (m.ok && acc) ++corpus_ok;
    else if (corpus_fail.empty())
      corpus_fail = e.name + (m.ok ? ": accounting" : ": " + to_string(m.diagnostics.front()));
  }
  c.items.push_back({fmt::format("corpus {}/{}", corpus_ok, corpus_n), corpus_ok == corpus_n, corpus_fail});

  GenOptions o;
  o.max_depth = kGenDepth;
  auto gen = generate_processes(kGenerated, kGenSeed, o);
  int typed = 0, minimal = 0, accounted = 0, shallow = 0;
  Coverage cov;
  std::string fail;
  for (auto& g : gen) {
    cov += coverage(g.process);
    if (max_prefix_depth(g.process, false) <= kGenDepth) ++shallow;
    if (!check_process({}, g.process).ok) {
      if (fail.empty()) fail = "ill-typed: " + g.text;
      continue;
    }
    ++typed;
    Decomposition d = decompose(g.process);
    CheckResult m = check_minimal_typed(d.term, d.envs);
    if (m.ok) ++minimal;
    else if (fail.empty()) fail = g.text + ": " + to_string(m.diagnostics.front());
    if (propagator_accounting(g.process, d.term)) ++accounted;
    else if (fail.empty()) fail = "accounting: " + g.text;
  }
  int n = static_cast<int>(gen.size());
  c.items.push_back({fmt::format("generated count {} >= {}", n, kGenerated), gen.size() >= kGenerated, ""});
  c.items.push_back({fmt::format("generated depth <= {}: {}/{}", kGenDepth, shallow, n), shallow == n, ""});
  c.items.push_back({fmt::format("generated well-typed {}/{}", typed, n), typed == n, fail});
  c.items.push_back({fmt::format("generated minimal {}/{}", minimal, n), minimal == n, fail});
  c.items.push_back({fmt::format("generated accounting {}/{}", accounted, n), accounted == n, fail});
  c.items.push_back({"construct coverage", cov.complete(), cov.summary()});
  return c;
}

Criterion steps() {
  Criterion c{4, "step counts under the deterministic policy", {}, {}};
  for (const char* name : {"boolean-exchange", "math-server", "recursion"}) {
    for (auto& v : check_program(entry(name), Opt::None)) {
      bool step_label = v.label.rfind("source reaches", 0) == 0 || v.label.rfind("source inert", 0) == 0 ||
                        v.label.rfind("decomposition reaches", 0) == 0;
      if (step_label) c.items.push_back({fmt::format("{}: {}", name, v.label), v.pass, v.detail});
    }
  }
  c.notes.push_back("policy: most recently enabled redex first; terms compared up to normalize and alpha");
  return c;
}

Criterion reduction() {
  Criterion c{5, fmt::format("subject reduction, exhaustive to depth {}", kReductionFuel), {}, {}};
  for (auto& e : corpus()) {
    Program prog = load_program(e.text);
    if (!prog.source) continue;
    ReductionReport r = check_subject_reduction(prog.source, source_envs(prog.env), kReductionFuel);
    c.items.push_back({fmt::format("{} source: {} states", e.name, r.states), r.ill_typed == 0, r.first_failure});
    for (Opt o : {Opt::None, Opt::Duos, Opt::Monadic}) {
      Built b = build(prog, o);
      ReductionReport d = check_subject_reduction(b.term, b.envs, kReductionFuel);
      c.items.push_back(
          {fmt::format("{} --opt {}: {} states", e.name, to_string(o), d.states), d.ill_typed == 0, d.first_failure});
    }
  }
  return c;
}

Criterion optimizations() {
  Criterion c{6, "duos and monadic forms", {}, {}};
  for (auto& e : corpus()) {
    Program prog = load_program(e.text);
    if (!prog.source) continue;
    Built duo = build(prog, Opt::Duos);
    int depth = max_prefix_depth(duo.term, true);
    c.items.push_back({fmt::format("{} duos depth {} <= 2", e.name, depth), depth <= 2, ""});
    CheckResult dm = check_minimal_typed(duo.term, duo.envs);
    c.items.push_back({e.name + " duos minimal", dm.ok, dm.ok ? "" : to_string(dm.diagnostics.front())});
    Built mono = build(prog, Opt::Monadic);
    auto bad = non_monadic_prefixes(mono.term);
    c.items.push_back({e.name + " monadic arity 1", bad.empty(),
                       bad.empty() ? "" : fmt::format("arity {} on {}", bad[0].first, print_name(bad[0].second))});
    CheckResult mm = check_minimal_typed(mono.term, mono.envs);
    c.items.push_back({e.name + " monadic minimal", mm.ok, mm.ok ? "" : to_string(mm.diagnostics.front())});
    if (!e.terminating) continue;
    for (auto [label, term] : {std::pair{"duos", duo.term}, std::pair{"monadic", mono.term}}) {
      Trace t = run(term, Policy::Deterministic, kInertFuel);
      c.items.push_back({fmt::format("{} {} inert after {} steps", e.name, label, t.steps.size()),
                         t.terminal == Terminal::Inert, to_string(t.terminal)});
    }
  }
  return c;
}

} // namespace

int main(int argc, char** argv) {
  std::set<int> expected_fail;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "--expect-fail" && i + 1 < argc) expected_fail.insert(std::atoi(argv[++i]));
    else {
      std::cerr << "usage: hodecomp_acceptance [--expect-fail N]...\n";
      return 2;
    }
  }

  auto start = std::chrono::steady_clock::now();
  std::vector<std::function<Criterion()>> all = {types, degrees, minimality, steps, reduction, optimizations};
  bool as_expected = true;
  for (auto& f : all) {
    Criterion c = f();
    bool pass = c.pass();
    std::cout << fmt::format("{} criterion {}: {}\n", pass ? "PASS" : "FAIL", c.id, c.title);
    for (auto& i : c.items) {
      if (i.pass && i.detail.empty()) continue;
      std::cout << fmt::format("    {} {}{}\n", i.pass ? "ok  " : "FAIL", i.what, i.detail.empty() ? "" : ": " + i.detail);
    }
    if (!pass)
      for (auto& n : c.notes) std::cout << "    note: " << n << "\n";
    if (pass == expected_fail.count(c.id) > 0) as_expected = false;
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool fast = secs <= kRuntimeBudgetSeconds;
  std::cout << fmt::format("{} runtime {:.1f}s <= {:.0f}s\n", fast ? "PASS" : "FAIL", secs, kRuntimeBudgetSeconds);
  if (!expected_fail.empty()) {
    std::string ids;
    for (int i : expected_fail) ids += (ids.empty() ? "" : ", ") + std::to_string(i);
    std::cout << fmt::format("expected failures: criterion {}; outcome {}\n", ids,
                             as_expected ? "matches" : "differs");
  }
  return as_expected && fast ? 0 : 1;
}
