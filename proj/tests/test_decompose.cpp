#include "doctest.h"

#include <algorithm>
#include <set>

#include "hodecomp/corpus.hpp"
#include "hodecomp/decompose.hpp"
#include "hodecomp/generate.hpp"
#include "hodecomp/program.hpp"
#include "support.hpp"

using namespace hodecomp;
using oracle::P;
using oracle::T;

namespace {

ProcP reserved(const char* s) { return parse_process(s, {true, true}); }
ValP reserved_value(const char* s) { return parse_value(s, {true, true}); }

struct Context {
  int scopes = 0;
  int mismatched = 0;
};

// Payload tuple on each restricted propagator equals the binder tuple of
// its reader, variable for variable. Triggers carrying an abstraction, as in
// selection, are exempt.
void context(const ProcP& p, Context& c);
void context(const ValP& v, Context& c) {
  if (auto a = as<AbsV>(v)) context(a->body, c);
}
void context(const ProcP& p, Context& c) {
  std::visit(
      [&](auto&& x) {
        using X = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<X, Output>) {
          for (auto& v : x.payload) context(v, c);
          context(x.cont, c);
        } else if constexpr (std::is_same_v<X, Input> || std::is_same_v<X, Select>) {
          context(x.cont, c);
        } else if constexpr (std::is_same_v<X, Branch>) {
          for (auto& [l, q] : x.cases) context(q, c);
        } else if constexpr (std::is_same_v<X, App>) {
          context(x.fun, c);
        } else if constexpr (std::is_same_v<X, Par>) {
          context(x.left, c);
          context(x.right, c);
        } else if constexpr (std::is_same_v<X, Res>) {
          if (x.name.propagator() && !x.name.rec_propagator()) {
            oracle::PropUse u;
            oracle::scan(x.body, x.name, u);
            bool values = u.sent.size() == 1 && std::count(u.sent[0].begin(), u.sent[0].end(), "") > 0;
            if (u.sent.size() == 1 && u.expected.size() == 1 && !values) {
              ++c.scopes;
              if (u.sent[0] != u.expected[0]) ++c.mismatched;
            }
          }
          context(x.body, c);
        }
      },
      p->v);
}

std::set<std::string> name_keys(const std::vector<Name>& ns) {
  std::set<std::string> out;
  for (auto& n : ns) out.insert(print_name(n.plain()));
  return out;
}

} // namespace

TEST_SUITE("decompose") {

TEST_CASE("degree of inaction") { CHECK(degree(P("0")) == 1); }

TEST_CASE("degree clause table") {
  CHECK(degree(P("u_1!(1).0")) == 2);
  CHECK(degree(P("u_1?(x).0")) == 2);
  CHECK(degree(P("select u_1 l . 0")) == 3);
  CHECK(degree(P("branch u_1 { a: u_1!(1).0 ; b: 0 }")) == 1);
  CHECK(degree(P("apply x (u_1)")) == 1);
  CHECK(degree(P("apply (\\lin(y:end) -> 0) (u_1)")) == 2);
  CHECK(degree(P("apply (\\un(y:end) -> 0) (u_1)")) == 1);
  CHECK(degree(P("0 | 0")) == 3);
  CHECK(degree(P("new s in 0")) == 1);
  CHECK(degree(P("u_1!(\\lin(y:end) -> 0 | 0).0")) == 5);
  CHECK(degree_val(mk::var("x")) == 0);
  CHECK(degree_val(mk::lit(std::int64_t{4})) == 0);
}

TEST_CASE("degree agrees with the clause oracle") {
  for (auto& e : corpus()) {
    Program prog = load_program(e.text);
    if (!prog.source) continue;
    CHECK(degree(prog.source) == oracle::proc_degree(prog.source));
    for (auto& [n, v] : prog.file.values) CHECK(degree_val(v) == oracle::value_degree(v));
    for (auto& [n, q] : prog.file.procs) CHECK(degree(q) == oracle::proc_degree(q));
  }
  for (auto& g : generate_processes(200, 3)) CHECK(degree(g.process) == oracle::proc_degree(g.process));
}

TEST_CASE("boolean exchange degrees") {
  Program prog = load_program(find_corpus_entry("boolean-exchange")->text);
  std::map<std::string, int> got;
  for (auto& [n, v] : prog.file.values) got[n] = degree_val(v);
  for (auto& [n, q] : prog.file.procs) got[n] = degree(q);
  CHECK(got["V"] == 2);
  CHECK(got["Wp"] == 2);
  CHECK(got["W"] == 4);
  CHECK(got["Q"] == 9);
  CHECK(got["R"] == 9);
  CHECK(degree(prog.source) == 19);
}

TEST_CASE("math server degrees") {
  Program prog = load_program(find_corpus_entry("math-server")->text);
  std::map<std::string, int> got;
  for (auto& [n, q] : prog.file.procs) got[n] = degree(q);
  CHECK(got["Q"] == 1);
  CHECK(got["R"] == 4);
  CHECK(degree(prog.source) == 6);
}

TEST_CASE("inaction breakdown") {
  BreakdownState st;
  st.k = 1;
  CHECK(alpha_eq(breakdown_proc(st, P("0")), reserved("#1?().0")));
}

TEST_CASE("smallest decomposition") {
  Decomposition d = decompose(P("0"));
  CHECK(alpha_eq(d.term, reserved("new #1 in (~#1!().0 | #1?().0)")));
  CHECK(d.propagators == std::vector<Name>{prop(1)});
  CHECK(d.recpropagators.empty());
}

TEST_CASE("value breakdown: variable and abstraction") {
  BreakdownState st = initial_state({{Name{"m"}, T("!<Bool>;end")}}, 3);
  CHECK(alpha_eq(breakdown_value(st, mk::var("y")), mk::var("y")));
  ValP v = oracle::V("\\lin(z:?<lin(!<Bool>;end)>;end) -> z?(x).apply x (m)");
  ValP want = reserved_value("\\lin(z_1) -> (~#3!().0 | #3?().z_1?(x).~#4!(x).0 | #4?(x).apply x (m_1))");
  CHECK(alpha_eq(breakdown_value(st, v), want));
}

TEST_CASE("value breakdown: empty body at k = 9") {
  BreakdownState st;
  st.k = 9;
  ValP v = oracle::V("\\lin(b:end) -> 0");
  CHECK(alpha_eq(breakdown_value(st, v), reserved_value("\\lin(b_1) -> (~#9!().0 | #9?().0)")));
}

TEST_CASE("shared abstractions restrict their own propagators") {
  BreakdownState st;
  st.k = 4;
  ValP v = oracle::V("\\un(x:Int) -> 0");
  CHECK(alpha_eq(breakdown_value(st, v), reserved_value("\\un(x) -> new #1 in (~#1!().0 | #1?().0)")));
}

TEST_CASE("boolean exchange decomposition head") {
  Program prog = load_program(find_corpus_entry("boolean-exchange")->text);
  Decomposition d = decompose(prog.source, prog.env);
  CHECK(d.propagators.size() == 19);
  CHECK(restricted_propagators(d.term) == [] {
    std::vector<int> v;
    for (int i = 1; i <= 19; ++i) v.push_back(i);
    return v;
  }());
  CHECK(check_minimal_typed(d.term, d.envs).ok);
}

TEST_CASE("recursive free names get servers") {
  Program prog = load_program(find_corpus_entry("recursion")->text);
  Decomposition d = decompose(prog.source, prog.env);
  bool has_rec_prop = !d.recpropagators.empty() || print(d.term).find("#rec:") != std::string::npos;
  CHECK(has_rec_prop);
  CHECK(check_minimal_typed(d.term, d.envs).ok);
}

TEST_CASE("binding order of context tuples") {
  BreakdownState st;
  st.rank = {{"a", 2}, {"b", 1}, {"c", 3}};
  CHECK(context_order(st, {"c", "a", "b"}) == std::vector<std::string>{"b", "a", "c"});
  CHECK(context_order(st, {"z", "a"}) == std::vector<std::string>{"a", "z"});
}

TEST_CASE("binder expansion") {
  BinderExpansion e = expand_binder(Name{"y"}, T("!<Int>;?<Bool>;end"));
  REQUIRE(e.params.size() == 2);
  CHECK(e.params[0].name == Name{"y", 1});
  CHECK(e.params[1].name == Name{"y", 2});
  CHECK(e.servers.empty());
  BinderExpansion r = expand_binder(Name{"y"}, T("rec t . !<Int>;?<Bool>;t"));
  CHECK(r.params.size() == 2);
  CHECK(r.servers.size() == 1);
  CHECK(r.info.rec);
}

TEST_CASE("advance_name moves the index of linear sessions only") {
  BreakdownState st = initial_state({{Name{"s"}, T("!<Int>;?<Int>;end")}, {Name{"r"}, T("rec t . !<Int>;t")}});
  BreakdownState a = advance_name(st, Name{"s"}, T("?<Int>;end"));
  CHECK(a.names[Name{"s"}].target == Name{"s", 2});
  BreakdownState b = advance_name(st, Name{"r"}, T("rec t . !<Int>;t"));
  CHECK(b.names[Name{"r"}].target == Name{"r", 1});
}

TEST_CASE("open or ill-typed input is refused") {
  CHECK_THROWS_AS(decompose(P("u?(x).apply y (u)")), DecomposeError);
  CHECK_THROWS_AS(decompose(P("new s : !<Int>;end in s!(true).0")), DecomposeError);
}

TEST_CASE("corpus decompositions: trio chaining and context discipline") {
  for (auto& e : corpus()) {
    Program prog = load_program(e.text);
    if (!prog.source) continue;
    CAPTURE(e.name);
    Decomposition d = decompose(prog.source, prog.env);
    oracle::ChainReport r;
    oracle::chain(d.term, r);
    CHECK(r.scopes > 0);
    CHECK(r.bad_counts == 0);
    CHECK(r.bad_arity == 0);
    Context c;
    context(d.term, c);
    CHECK(c.mismatched == 0);
  }
}

TEST_CASE("generated processes: minimal, accounted, chained, closed") {
  Coverage cov;
  for (auto& g : generate_processes(200, 42)) {
    CAPTURE(g.text);
    cov += coverage(g.process);
    Decomposition d = decompose(g.process);
    CHECK(check_minimal_typed(d.term, d.envs).ok);
    CHECK(propagator_accounting(g.process, d.term));
    oracle::ChainReport r;
    oracle::chain(d.term, r);
    CHECK(r.bad_counts == 0);
    CHECK(r.bad_arity == 0);
    Context c;
    context(d.term, c);
    CHECK(c.mismatched == 0);
    CHECK(free_names(d.term).empty());
  }
  CHECK(cov.complete());
}

TEST_CASE("free names of a decomposition are the initialized source names") {
  for (auto& e : corpus()) {
    Program prog = load_program(e.text);
    if (!prog.source) continue;
    CAPTURE(e.name);
    Decomposition d = decompose(prog.source, prog.env);
    std::vector<Name> fn = free_names(prog.source);
    std::vector<Name> plain;
    for (auto& n : fn) plain.push_back(n.with_index(0));
    std::set<std::string> allowed;
    for (auto& n : prog.env) {
      std::size_t len = is_session(n.second) ? (is_recursive_session(n.second) ? rsdecomp(n.second).size()
                                                                               : gdecomp(n.second).size())
                                             : 1;
      for (std::size_t j = 0; j < len; ++j) allowed.insert(print_name(n.first.plain().with_index(int(j) + 1)));
    }
    for (auto& k : name_keys(free_names(d.term))) CHECK(allowed.count(k));
  }
}

}
