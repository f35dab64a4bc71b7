#include "doctest.h"

#include <set>

#include "hodecomp/corpus.hpp"
#include "hodecomp/generate.hpp"
#include "hodecomp/program.hpp"
#include "hodecomp/semantics.hpp"
#include "json.hpp"
#include "support.hpp"

using namespace hodecomp;
using oracle::P;

namespace {

std::multiset<std::string> successor_keys(const ProcP& p) {
  std::multiset<std::string> out;
  for (auto& [r, q] : step(p)) out.insert(canonical_key(q));
  return out;
}

} // namespace

TEST_SUITE("semantics") {

TEST_CASE("normalize axioms") {
  CHECK(canonical_key(P("u!(1).0 | 0")) == canonical_key(P("u!(1).0")));
  CHECK(canonical_key(P("new n : !<Int>;end in 0")) == canonical_key(P("0")));
  CHECK(canonical_key(P("(a!(1).0 | b!(2).0) | c!(3).0")) == canonical_key(P("a!(1).0 | (b!(2).0 | c!(3).0)")));
  CHECK(canonical_key(P("a!(1).0 | b!(2).0")) == canonical_key(P("b!(2).0 | a!(1).0")));
  CHECK(congruent(P("new s in (s!(1).0 | ~s?(x).0) | u!(1).0"), P("new s in (u!(1).0 | (~s?(x).0 | s!(1).0))")));
  CHECK_FALSE(congruent(P("u!(1).0"), P("u!(2).0")));
}

TEST_CASE("normalize is idempotent") {
  for (auto& g : generate_processes(50, 9)) CHECK(canonical_key(normalize(g.process)) == canonical_key(g.process));
}

TEST_CASE("application") {
  auto s = step(P("apply (\\lin(x:!<Int>;end) -> x!(1).0) (u)"));
  REQUIRE(s.size() == 1);
  CHECK(s[0].first.rule == Rule::App);
  CHECK(congruent(s[0].second, P("u!(1).0")));
}

TEST_CASE("passing") {
  auto s = step(P("new n in (n!(\\lin(y:end) -> 0).a!(1).0 | ~n?(x).apply x (b))"));
  REQUIRE(s.size() == 1);
  CHECK(s[0].first.rule == Rule::Pass);
  CHECK(congruent(s[0].second, P("a!(1).0 | apply (\\lin(y:end) -> 0) (b)")));
}

TEST_CASE("polyadic passing is simultaneous") {
  auto s = step(P("new n in (n!(1, 2).0 | ~n?(x, y).u!(y, x).0)"));
  REQUIRE(s.size() == 1);
  CHECK(congruent(s[0].second, P("u!(2, 1).0")));
}

TEST_CASE("selection") {
  auto s = step(P("new n in (select n b . a!(1).0 | branch ~n { a: 0 ; b: c!(2).0 })"));
  REQUIRE(s.size() == 1);
  CHECK(s[0].first.rule == Rule::Sel);
  CHECK(congruent(s[0].second, P("a!(1).0 | c!(2).0")));
}

TEST_CASE("shared names pass between any two endpoints") {
  auto s = step(P("new k : chan Int in (k!(1).0 | k?(x).0 | k?(y).0)"));
  CHECK(s.size() == 2);
}

TEST_CASE("inertness") {
  CHECK(is_inert(P("0")));
  CHECK(is_inert(P("new s in ~s?(x).0")));
  CHECK_FALSE(is_inert(P("new s in (s!(1).0 | ~s?(x).0)")));
}

TEST_CASE("run") {
  Trace t = run(P("new s in (s!(1).s!(2).0 | ~s?(x).~s?(y).0)"), Policy::Deterministic, 10);
  CHECK(t.steps.size() == 2);
  CHECK(t.terminal == Terminal::Inert);
  Trace f = run(P("new s in (s!(1).s!(2).0 | ~s?(x).~s?(y).0)"), Policy::Deterministic, 1);
  CHECK(f.terminal == Terminal::FuelExhausted);
  Trace stuck = run(P("u!(1).0"), Policy::Deterministic, 10);
  CHECK(stuck.terminal == Terminal::Stuck);
  Trace all = run(P("new k : chan Int in (k!(1).0 | k?(x).0 | k?(y).0)"), Policy::Exhaustive, 10);
  CHECK_FALSE(all.terminals.empty());
}

TEST_CASE("trace records are line-delimited JSON") {
  Trace t = run(P("new s in (s!(1).0 | ~s?(x).0)"), Policy::Deterministic, 5);
  std::string j = trace_jsonl(t);
  std::size_t lines = 0, pos = 0;
  while ((pos = j.find('\n', pos)) != std::string::npos) ++lines, ++pos;
  CHECK(lines == t.steps.size() + 1);
  auto first = nlohmann::json::parse(j.substr(0, j.find('\n')));
  CHECK(first["rule"] == "Pass");
  CHECK(first["step"] == 1);
  CHECK(first.contains("path"));
  CHECK(first.contains("term"));
}

TEST_CASE("step commutes with normalize") {
  for (auto& e : corpus()) {
    Program prog = load_program(e.text);
    if (!prog.source) continue;
    for (Opt o : {Opt::None, Opt::Duos, Opt::Monadic}) {
      ProcP p = build(prog, o).term;
      for (int n = 0; n < 6 && p; ++n) {
        CHECK(successor_keys(p) == successor_keys(normalize(p)));
        auto s = step(p);
        p = s.empty() ? nullptr : s.front().second;
      }
    }
  }
  for (auto& g : generate_processes(40, 77)) CHECK(successor_keys(g.process) == successor_keys(normalize(g.process)));
}

TEST_CASE("terminating corpus entries have a single inert outcome") {
  for (auto& e : corpus()) {
    if (!e.terminating) continue;
    Program prog = load_program(e.text);
    CAPTURE(e.name);
    for (ProcP p : {prog.source, build(prog, Opt::None).term}) {
      Exploration ex = explore(p, 200);
      REQUIRE(ex.complete);
      std::set<std::string> inert;
      for (std::size_t i : ex.terminals) {
        CHECK(is_inert(ex.nodes[i].term));
        inert.insert(ex.nodes[i].key);
      }
      CHECK(inert.size() == 1);
    }
  }
}

TEST_CASE("subject reduction on generated processes") {
  GenOptions o;
  o.max_session = 2;
  o.rec_rate = 0.1;
  for (auto& g : generate_processes(20, 300, o)) {
    CAPTURE(g.text);
    ReductionReport r = check_subject_reduction(g.process, {}, 8);
    CHECK(r.ill_typed == 0);
    Decomposition d = decompose(g.process);
    ReductionReport rd = check_subject_reduction(d.term, d.envs, 8);
    CHECK(rd.ill_typed == 0);
  }
}

TEST_CASE("envs_after_step keeps the unchanged environment first") {
  TypeEnvs e;
  e.delta[Name{"s", 1}] = oracle::T("!<Int>;end");
  e.delta[Name{"s", 1, true}] = oracle::T("?<Int>;end");
  auto next = envs_after_step(e);
  REQUIRE(next.size() == 2);
  CHECK(type_equal(next[0].delta[Name{"s", 1}], oracle::T("!<Int>;end")));
  CHECK(type_equal(next[1].delta[Name{"s", 1}], t_end()));
}

}
