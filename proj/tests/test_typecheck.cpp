#include "doctest.h"

#include "hodecomp/corpus.hpp"
#include "hodecomp/decompose.hpp"
#include "hodecomp/generate.hpp"
#include "hodecomp/program.hpp"
#include "support.hpp"

using namespace hodecomp;
using oracle::P;
using oracle::T;

namespace {

TypeEnvs delta(std::initializer_list<std::pair<Name, const char*>> es) {
  TypeEnvs e;
  for (auto& [n, t] : es) e.delta[n] = T(t);
  return e;
}

ProcP raw(const char* s) { return parse_process(s, {false, false}); }

// Open processes using the free session name x at the paired type.
const std::pair<const char*, const char*> kOpen[] = {
    {"x!(1).x?(y).0", "!<Int>;?<Int>;end"},
    {"x?(y).select x ok . 0", "?<Bool>;+{ok: end, no: end}"},
    {"branch x { a: x!(true).0 ; b: 0 }", "&{a: !<Bool>;end, b: end}"},
    {"x!(\\lin(z:?<Int>;end) -> z?(q).0).0", "!<lin(?<Int>;end)>;end"},
    {"x?(f).new r : ?<Int>;end in (apply f (r) | ~r!(3).0)", "?<lin(?<Int>;end)>;end"},
};

} // namespace

TEST_SUITE("typecheck") {

TEST_CASE("inaction") { CHECK(check_process({}, P("0")).ok); }

TEST_CASE("direction mismatch fails at Send") {
  CheckResult r = check_process(delta({{Name{"s"}, "?<Int>;end"}}), raw("s!(1).0"));
  REQUIRE_FALSE(r.ok);
  CHECK(r.diagnostics[0].rule == "Send");
}

TEST_CASE("unused session fails") {
  CHECK_FALSE(check_process(delta({{Name{"s"}, "!<Int>;end"}}), raw("0")).ok);
}

TEST_CASE("values") {
  TypeEnvs e;
  e.lambda["y"] = T("lin(end)");
  auto [u, r] = check_value(e, mk::var("y"));
  CHECK(r.ok);
  CHECK(type_equal(u, T("lin(end)")));

  auto [u2, r2] = check_value({}, oracle::V("\\lin(x:end) -> 0"));
  CHECK(r2.ok);
  CHECK(type_equal(u2, T("lin(end)")));

  auto [u3, r3] = check_value(e, parse_value("\\un(x:end) -> apply y (x)", {false, false}));
  REQUIRE_FALSE(r3.ok);
  CHECK(r3.diagnostics[0].rule == "Prom");
}

TEST_CASE("encoded boolean exchange is well typed") {
  Program prog = load_program(find_corpus_entry("boolean-exchange")->text);
  CHECK(check_process(source_envs(prog.env), prog.source).ok);
}

TEST_CASE("two-prefix session types are not minimal") {
  ProcP p = P("new s : !<Int>;!<Int>;end in (s!(1).s!(2).0 | ~s?(a).~s?(b).0)");
  CHECK(check_process({}, p).ok);
  CheckResult m = check_minimal_typed(p);
  REQUIRE_FALSE(m.ok);
  CHECK(m.diagnostics[0].rule == "Minimal");
}

TEST_CASE("smallest decomposition is minimally typed") {
  CHECK(check_minimal_typed(decompose(P("0")).term).ok);
}

TEST_CASE("shared names") {
  CHECK(check_process({}, P("new k : chan Int in (k!(1).0 | k?(x).0 | k?(y).0 | k!(2).0)")).ok);
  CHECK_FALSE(check_process({}, P("new k : chan Int in k!(true).0")).ok);
}

TEST_CASE("weakening with an unused shared entry") {
  for (auto& [p, s] : kOpen) {
    TypeEnvs e = delta({{Name{"x"}, s}});
    REQUIRE(check_process(e, raw(p)).ok);
    e.gamma_vars["w"] = T("un(end)");
    CHECK(check_process(e, raw(p)).ok);
    e.gamma_names[Name{"a", 0, false, true}] = T("chan Int");
    CHECK(check_process(e, raw(p)).ok);
  }
}

TEST_CASE("strengthening removes unused shared entries") {
  for (auto& [p, s] : kOpen) {
    TypeEnvs e = delta({{Name{"x"}, s}});
    e.gamma_vars["w"] = T("un(end)");
    bool with = check_process(e, raw(p)).ok;
    e.gamma_vars.erase("w");
    CHECK(check_process(e, raw(p)).ok == with);
  }
}

TEST_CASE("substitution of a fresh name") {
  for (auto& [p, s] : kOpen) {
    Subst sub;
    sub.names[Name{"x"}] = Name{"fresh", 3};
    ProcP q = substitute(raw(p), sub);
    bool a = check_process(delta({{Name{"x"}, s}}), raw(p)).ok;
    bool b = check_process(delta({{Name{"fresh", 3}, s}}), q).ok;
    CHECK(a);
    CHECK(a == b);
    // A mismatched type is rejected on both sides alike.
    bool c = check_process(delta({{Name{"x"}, "end"}}), raw(p)).ok;
    bool d = check_process(delta({{Name{"fresh", 3}, "end"}}), q).ok;
    CHECK_FALSE(c);
    CHECK(c == d);
  }
}

TEST_CASE("generated processes are well typed") {
  for (auto& g : generate_processes(100, 1)) {
    CAPTURE(g.text);
    CHECK(check_process({}, g.process).ok);
  }
}

TEST_CASE("diagnostics carry a path") {
  CheckResult r = check_process({}, P("new s : !<Int>;end in (s!(true).0 | ~s?(x).0)"));
  REQUIRE_FALSE(r.ok);
  CHECK_FALSE(r.diagnostics[0].path.empty());
  CHECK(to_string(r.diagnostics[0]).find("[") != std::string::npos);
}

TEST_CASE("envs_from_decls") {
  TypeEnvs e = envs_from_decls({{Name{"m", 1}, T("!<Int>;end")}, {Name{"a", 0, false, true}, T("chan Int")}});
  CHECK(e.delta.size() == 1);
  CHECK(e.gamma_names.size() == 1);
}

}
