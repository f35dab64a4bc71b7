#include "doctest.h"
#include <functional>
#include <set>

#include "hodecomp/generate.hpp"
#include "support.hpp"

using namespace hodecomp;
using oracle::P;
using oracle::V;

TEST_SUITE("ast") {

TEST_CASE("names: duality and equality") {
  Name s{"s", 2};
  CHECK(s.co().dual);
  CHECK(s.co().co() == s);
  Name a{"a", 1, false, true};
  CHECK(a.co() == a);
  CHECK(Name{"s", 1} != Name{"s", 2});
  CHECK(Name{"s", 1} != Name{"s", 1, true});
  CHECK(Name{"a", 1, false, true} == Name{"a", 1, false, false});
  CHECK(prop(3).propagator());
  CHECK_FALSE(prop(3).rec_propagator());
  CHECK(rec_prop(Name{"a"}).rec_propagator());
  CHECK(prop(3).reserved());
}

TEST_CASE("free_vars") {
  CHECK(free_vars(P("0")).empty());
  CHECK(free_vars(P("u!(y).0")) == std::vector<std::string>{"y"});
  CHECK(free_vars(V("\\lin(z) -> z?(x).apply x (m_1)")).empty());
  CHECK(free_vars(P("u!(y).u!(x).u!(y).0")) == std::vector<std::string>{"y", "x"});
  CHECK(free_vars(P("u?(x).apply x (v) | apply y (v)")) == std::vector<std::string>{"y"});
}

TEST_CASE("free_names are first-occurrence ordered") {
  auto ns = free_names(P("b!(1).a!(2).0 | new s in (s!(1).0 | ~s?(x).0) | b?(y).0"));
  REQUIRE(ns.size() == 2);
  CHECK(ns[0].base == "b");
  CHECK(ns[1].base == "a");
}

TEST_CASE("init_names") {
  std::vector<Name> us{{"a"}, {"b"}, {"s"}, {"s'"}};
  auto r = init_names(us);
  REQUIRE(r.size() == 4);
  for (std::size_t i = 0; i < r.size(); ++i) {
    CHECK(r[i].index == 1);
    CHECK(r[i].base == us[i].base);
  }
  CHECK(init_names({}).empty());
  auto d = init_names({Name{"s"}, Name{"s", 0, true}});
  CHECK(d[0] == Name{"s", 1});
  CHECK(d[1] == Name{"s", 1, true});
  CHECK_THROWS_AS(init_names({Name{"s", 2}}), std::invalid_argument);
}

TEST_CASE("init_names is idempotent after stripping indices") {
  std::vector<Name> us{{"x"}, {"y", 0, true}, {"a", 0, false, true}};
  auto once = init_names(us);
  std::vector<Name> stripped;
  for (auto& n : once) stripped.push_back(n.with_index(0));
  auto twice = init_names(stripped);
  CHECK(once == twice);
  CHECK(once.size() == us.size());
}

TEST_CASE("substitute: variable replacement") {
  ProcP p = P("apply x (u)");
  Subst s;
  s.vars["x"] = V("\\lin(y:end) -> 0");
  CHECK(alpha_eq(substitute(p, s), P("apply (\\lin(y:end) -> 0) (u)")));
}

TEST_CASE("substitute: index shift on every occurrence") {
  ProcP p = P("u_3!(y).u_3?(z).0");
  Subst s;
  s.names[Name{"u", 3}] = Name{"u", 4};
  CHECK(alpha_eq(substitute(p, s), P("u_4!(y).u_4?(z).0")));
}

TEST_CASE("substitute: name replaced under a branch") {
  ProcP p = P("branch u_2 { l: u_2!(1).0 ; r: u_2?(x).0 }");
  Subst s;
  s.names[Name{"u", 2}] = Name{"y", 1};
  CHECK(alpha_eq(substitute(p, s), P("branch y_1 { l: y_1!(1).0 ; r: y_1?(x).0 }")));
}

TEST_CASE("substitute avoids capture") {
  // The bound x must not capture the free x carried in by the value.
  ProcP p2 = parse_process("u?(x).apply y (v)", {false, false});
  Subst s;
  s.vars["y"] = mk::var("x");
  ProcP r = substitute(p2, s);
  auto in = as<Input>(r);
  REQUIRE(in);
  CHECK(in->binders[0] != "x");
  CHECK(free_vars(r) == std::vector<std::string>{"x"});
}

TEST_CASE("substitute: identity is alpha-neutral on generated processes") {
  for (auto& g : generate_processes(40, 7)) CHECK(alpha_eq(substitute(g.process, Subst{}), g.process));
}

TEST_CASE("substitute: free variables after substitution") {
  const char* terms[] = {"u!(x).apply x (v)", "u?(z).apply x (z) | apply w (v)", "select u l . apply x (u)"};
  for (const char* t : terms) {
    ProcP p = parse_process(t, {false, false});
    ValP val = parse_value("\\lin(q:end) -> apply k (q)", {false, false});
    Subst s;
    s.vars["x"] = val;
    std::set<std::string> want;
    for (auto& y : free_vars(p))
      if (y != "x") want.insert(y);
    for (auto& y : free_vars(val)) want.insert(y);
    auto got = free_vars(substitute(p, s));
    CHECK(std::set<std::string>(got.begin(), got.end()) == want);
  }
}

TEST_CASE("alpha_eq") {
  CHECK(alpha_eq(P("new s in s!(1).0"), P("new t in t!(1).0")));
  CHECK(alpha_eq(V("\\lin(x:end) -> apply x (u)"), V("\\lin(y:end) -> apply y (u)")));
  CHECK_FALSE(alpha_eq(P("u?(x).0"), P("u?(x).apply x (v)")));
  CHECK_FALSE(alpha_eq(P("u!(1).0"), P("u!(2).0")));
  CHECK(alpha_eq(P("new s : !<Int>;end in s!(1).0"), P("new t in t!(1).0")));
}

TEST_CASE("refresh_binders preserves alpha class") {
  for (auto& g : generate_processes(20, 99)) CHECK(alpha_eq(refresh_binders(g.process), g.process));
}

TEST_CASE("encode_namepass") {
  CHECK(alpha_eq(encode_namepass(P("0")), P("0")));
  ProcP out = mk::out(Name{"n"}, {mk::name(Name{"m"})}, mk::nil());
  CHECK(alpha_eq(encode_namepass(out), P("n!(\\lin(z) -> z?(x).apply x (m)).0")));
  ProcP in = P("n?(x).x!(true).0");
  ProcP enc = encode_namepass(in, {{Name{"n"}, oracle::T("?<!<Bool>;end>;end")}});
  CHECK(alpha_eq(enc, P("n?(y).new s in (apply y (s) | ~s!(\\lin(x) -> x!(\\lin(z) -> z?(w).apply w (true)).0).0)")));
}

TEST_CASE("encode_namepass: boolean exchange") {
  SourceFile f = parse_source(R"(
namepass;
name m : !<Bool>;end;
name ~m : ?<Bool>;end;
main = new u : !<!<Bool>;end>;end in (u!(m).~m?(b).0 | ~u?(x).x!(true).0);
)");
  NameTypes env(f.free_names.begin(), f.free_names.end());
  ProcP enc = encode_namepass(f.main, env);
  ProcP want = P(R"(new u in (
      (u!(\lin(z) -> z?(x).apply x (m)).~m?(y).new s in (apply y (s) | ~s!(\lin(b) -> 0).0))
    | ~u?(y).new s in (apply y (s) | ~s!(\lin(x) -> x!(\lin(z) -> z?(x).apply x (true)).0).0)))");
  CHECK(alpha_eq(enc, want));
}

TEST_CASE("encode_namepass leaves no name payloads") {
  SourceFile f = parse_source(R"(
namepass;
main = new m : ?<Bool>;end in new n : !<?<Bool>;end>;end in (n!(m).~m!(true).0 | ~n?(x).x?(b).0);
)");
  ProcP enc = encode_namepass(f.main, {});
  CHECK(print(enc).find("NameV") == std::string::npos);
  std::function<bool(const ProcP&)> has_name;
  std::function<bool(const ValP&)> val_has = [&](const ValP& v) {
    if (as<NameV>(v)) return true;
    if (auto a = as<AbsV>(v)) return has_name(a->body);
    return false;
  };
  has_name = [&](const ProcP& p) -> bool {
    return std::visit(
        [&](auto&& x) -> bool {
          using X = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<X, Output>) {
            for (auto& v : x.payload)
              if (val_has(v)) return true;
            return has_name(x.cont);
          } else if constexpr (std::is_same_v<X, Input> || std::is_same_v<X, Select>) {
            return has_name(x.cont);
          } else if constexpr (std::is_same_v<X, Branch>) {
            for (auto& [l, q] : x.cases)
              if (has_name(q)) return true;
            return false;
          } else if constexpr (std::is_same_v<X, App>) {
            return val_has(x.fun);
          } else if constexpr (std::is_same_v<X, Par>) {
            return has_name(x.left) || has_name(x.right);
          } else if constexpr (std::is_same_v<X, Res>) {
            return has_name(x.body);
          } else {
            return false;
          }
        },
        p->v);
  };
  CHECK_FALSE(has_name(enc));
}

TEST_CASE("encode_type") {
  CHECK(type_equal(encode_type(oracle::T("!<Int>;end")), oracle::T("!<lin(?<lin(Int)>;end)>;end")));
  CHECK(type_equal(encode_type(oracle::T("!<?<Bool>;end>;end")),
                   oracle::T("!<lin(?<lin(?<lin(?<lin(Bool)>;end)>;end)>;end)>;end")));
  CHECK(type_equal(encode_type(oracle::T("chan Int")), oracle::T("chan lin(?<lin(Int)>;end)")));
}

}
