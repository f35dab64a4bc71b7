#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "hodecomp/ast.hpp"
#include "hodecomp/syntax.hpp"
#include "hodecomp/types.hpp"

namespace oracle {

using namespace hodecomp;

inline ProcP P(const std::string& s) { return parse_process(s, {true, true}); }
inline ValP V(const std::string& s) { return parse_value(s, {true, true}); }
inline TypeP T(const std::string& s) { return parse_type(s); }

int proc_degree(const ProcP& p);

// Clause table for values: linear abstractions count their body, shared
// abstractions, variables and literals count nothing.
inline int value_degree(const ValP& v) {
  if (auto a = as<AbsV>(v)) return a->lin == Lin::lin ? proc_degree(a->body) : 0;
  return 0;
}

// Clause table for processes, written from the definition independently of
// the library.
inline int proc_degree(const ProcP& p) {
  if (auto o = as<Output>(p)) {
    int n = proc_degree(o->cont) + 1;
    for (auto& v : o->payload) n += value_degree(v);
    return n;
  }
  if (auto i = as<Input>(p)) return proc_degree(i->cont) + 1;
  if (auto s = as<Select>(p)) return proc_degree(s->cont) + 2;
  if (as<Branch>(p)) return 1;
  if (auto a = as<App>(p)) return value_degree(a->fun) + 1;
  if (auto q = as<Par>(p)) return proc_degree(q->left) + proc_degree(q->right) + 1;
  if (auto r = as<Res>(p)) return proc_degree(r->body);
  return 1;
}

// Occurrences of a propagator inside one restriction scope.
struct PropUse {
  int inputs = 0;
  int outputs = 0;
  std::vector<std::vector<std::string>> sent;     // payload variable tuples
  std::vector<std::vector<std::string>> expected; // binder tuples
};

void scan(const ProcP& p, const Name& c, PropUse& u);

inline void scan(const ValP& v, const Name& c, PropUse& u) {
  if (auto a = as<AbsV>(v)) scan(a->body, c, u);
}

inline void scan(const ProcP& p, const Name& c, PropUse& u) {
  std::visit(
      [&](auto&& x) {
        using X = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<X, Output>) {
          if (x.subj.base == c.base && x.subj.index == c.index) {
            ++u.outputs;
            std::vector<std::string> vs;
            for (auto& v : x.payload)
              if (auto var = as<VarV>(v)) vs.push_back(var->id);
              else vs.push_back("");
            u.sent.push_back(vs);
          }
          for (auto& v : x.payload) scan(v, c, u);
          scan(x.cont, c, u);
        } else if constexpr (std::is_same_v<X, Input>) {
          if (x.subj.base == c.base && x.subj.index == c.index) {
            ++u.inputs;
            u.expected.push_back(x.binders);
          }
          scan(x.cont, c, u);
        } else if constexpr (std::is_same_v<X, Select>) {
          scan(x.cont, c, u);
        } else if constexpr (std::is_same_v<X, Branch>) {
          for (auto& [l, q] : x.cases) scan(q, c, u);
        } else if constexpr (std::is_same_v<X, App>) {
          scan(x.fun, c, u);
        } else if constexpr (std::is_same_v<X, Par>) {
          scan(x.left, c, u);
          scan(x.right, c, u);
        } else if constexpr (std::is_same_v<X, Res>) {
          if (x.name.base == c.base && x.name.index == c.index) return; // shadowed
          scan(x.body, c, u);
        }
      },
      p->v);
}

// Every restricted non-recursive propagator is read once and written once in
// its scope, and the written tuple has the arity of the read binders.
struct ChainReport {
  int scopes = 0;
  int bad_counts = 0;
  int bad_arity = 0;
};

void chain(const ProcP& p, ChainReport& r);

inline void chain(const ValP& v, ChainReport& r) {
  if (auto a = as<AbsV>(v)) chain(a->body, r);
}

inline void chain(const ProcP& p, ChainReport& r) {
  std::visit(
      [&](auto&& x) {
        using X = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<X, Output>) {
          for (auto& v : x.payload) chain(v, r);
          chain(x.cont, r);
        } else if constexpr (std::is_same_v<X, Input> || std::is_same_v<X, Select>) {
          chain(x.cont, r);
        } else if constexpr (std::is_same_v<X, Branch>) {
          for (auto& [l, q] : x.cases) chain(q, r);
        } else if constexpr (std::is_same_v<X, App>) {
          chain(x.fun, r);
        } else if constexpr (std::is_same_v<X, Par>) {
          chain(x.left, r);
          chain(x.right, r);
        } else if constexpr (std::is_same_v<X, Res>) {
          if (x.name.propagator() && !x.name.rec_propagator()) {
            ++r.scopes;
            PropUse u;
            scan(x.body, x.name, u);
            if (u.inputs != 1 || u.outputs != 1) ++r.bad_counts;
            else if (u.sent[0].size() != u.expected[0].size()) ++r.bad_arity;
          }
          chain(x.body, r);
        }
      },
      p->v);
}

// Small session types over Int and Bool, with choices and tail recursion.
class TypeGen {
public:
  explicit TypeGen(unsigned seed) : rng_(seed) {}

  TypeP finite(int len) {
    if (len == 0) return t_end();
    switch (pick(5)) {
    case 0: return t_out({value()}, finite(len - 1));
    case 1: return t_in({value()}, finite(len - 1));
    case 2: return t_sel({{"a", finite(len - 1)}, {"b", finite(len - 1)}});
    case 3: return t_bra({{"a", finite(len - 1)}, {"b", finite(len - 1)}});
    default: return t_out({base()}, finite(len - 1));
    }
  }

  // μt.π1;…;πn;t with base payloads.
  TypeP recursive(int n) {
    TypeP body = t_var("t");
    for (int i = 0; i < n; ++i) body = pick(2) ? t_out({base()}, body) : t_in({base()}, body);
    return t_rec("t", body);
  }

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }

private:
  std::mt19937 rng_;
  TypeP base() { return pick(2) ? t_int() : t_bool(); }
  TypeP value() {
    switch (pick(3)) {
    case 0: return base();
    case 1: return t_lin({finite(1 + pick(2))});
    default: return t_sh({base()});
    }
  }
};

// Prefix count of a finite session type, choices counting one.
inline int prefixes(const TypeP& s) {
  switch (s->kind) {
  case TKind::Out:
  case TKind::In: return 1 + prefixes(s->next);
  case TKind::Sel:
  case TKind::Bra: return 1;
  case TKind::Rec: return prefixes(s->next);
  default: return 0;
  }
}

} // namespace oracle
