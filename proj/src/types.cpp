#include "hodecomp/types.hpp"

#include <algorithm>
#include <functional>
#include <optional>

namespace hodecomp {

namespace {

TypeP make(Type t) { return std::make_shared<const Type>(std::move(t)); }

int fresh_counter() {
  static int n = 0;
  return ++n;
}

} // namespace

TypeP t_end() {
  static const TypeP e = make(Type{TKind::End, {}, nullptr, {}, {}});
  return e;
}
TypeP t_out(TypeList p, TypeP c) { return make(Type{TKind::Out, std::move(p), std::move(c), {}, {}}); }
TypeP t_in(TypeList p, TypeP c) { return make(Type{TKind::In, std::move(p), std::move(c), {}, {}}); }
TypeP t_sel(Labels l) { return make(Type{TKind::Sel, {}, nullptr, std::move(l), {}}); }
TypeP t_bra(Labels l) { return make(Type{TKind::Bra, {}, nullptr, std::move(l), {}}); }
TypeP t_rec(std::string v, TypeP b) { return make(Type{TKind::Rec, {}, std::move(b), {}, std::move(v)}); }
TypeP t_var(std::string v) { return make(Type{TKind::Var, {}, nullptr, {}, std::move(v)}); }
TypeP t_chan(TypeP u) { return make(Type{TKind::Chan, {std::move(u)}, nullptr, {}, {}}); }
TypeP t_lin(TypeList p) { return make(Type{TKind::Lin, std::move(p), nullptr, {}, {}}); }
TypeP t_sh(TypeList p) { return make(Type{TKind::Sh, std::move(p), nullptr, {}, {}}); }
TypeP t_int() {
  static const TypeP i = make(Type{TKind::Int, {}, nullptr, {}, {}});
  return i;
}
TypeP t_bool() {
  static const TypeP b = make(Type{TKind::Bool, {}, nullptr, {}, {}});
  return b;
}

bool is_session(const TypeP& t) {
  switch (t->kind) {
  case TKind::End:
  case TKind::Out:
  case TKind::In:
  case TKind::Sel:
  case TKind::Bra:
  case TKind::Rec:
  case TKind::Var:
    return true;
  default:
    return false;
  }
}

bool is_arrow(const TypeP& t) { return t->kind == TKind::Lin || t->kind == TKind::Sh; }
bool is_base(const TypeP& t) { return t->kind == TKind::Int || t->kind == TKind::Bool; }

std::string show(const TypeList& ts) {
  std::string s;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i) s += ",";
    s += show(ts[i]);
  }
  return s;
}

std::string show(const TypeP& t) {
  if (!t) return "?";
  switch (t->kind) {
  case TKind::End: return "end";
  case TKind::Out: return "!<" + show(t->items) + ">;" + show(t->next);
  case TKind::In: return "?<" + show(t->items) + ">;" + show(t->next);
  case TKind::Sel:
  case TKind::Bra: {
    std::string s = t->kind == TKind::Sel ? "+{" : "&{";
    for (std::size_t i = 0; i < t->labels.size(); ++i) {
      if (i) s += ",";
      s += t->labels[i].first + ":" + show(t->labels[i].second);
    }
    return s + "}";
  }
  case TKind::Rec: return "rec " + t->var + " . " + show(t->next);
  case TKind::Var: return t->var;
  case TKind::Chan: return "chan " + show(t->items[0]);
  case TKind::Lin: return "lin(" + show(t->items) + ")";
  case TKind::Sh: return "un(" + show(t->items) + ")";
  case TKind::Int: return "Int";
  case TKind::Bool: return "Bool";
  }
  return "?";
}

std::set<std::string> free_tvars(const TypeP& t) {
  std::set<std::string> out;
  std::function<void(const TypeP&, std::set<std::string>&)> go = [&](const TypeP& x, std::set<std::string>& bound) {
    if (!x) return;
    if (x->kind == TKind::Var) {
      if (!bound.count(x->var)) out.insert(x->var);
      return;
    }
    if (x->kind == TKind::Rec) {
      bool added = bound.insert(x->var).second;
      go(x->next, bound);
      if (added) bound.erase(x->var);
      return;
    }
    for (auto& i : x->items) go(i, bound);
    if (x->next) go(x->next, bound);
    for (auto& l : x->labels) go(l.second, bound);
  };
  std::set<std::string> bound;
  go(t, bound);
  return out;
}

TypeP subst_tvar(const TypeP& t, const std::string& var, const TypeP& repl) {
  if (!t) return t;
  switch (t->kind) {
  case TKind::Var: return t->var == var ? repl : t;
  case TKind::Rec: {
    if (t->var == var) return t;
    if (free_tvars(repl).count(t->var)) {
      std::string fresh = t->var + "'" + std::to_string(fresh_counter());
      TypeP body = subst_tvar(t->next, t->var, t_var(fresh));
      return t_rec(fresh, subst_tvar(body, var, repl));
    }
    return t_rec(t->var, subst_tvar(t->next, var, repl));
  }
  case TKind::End:
  case TKind::Int:
  case TKind::Bool:
    return t;
  default: {
    Type c = *t;
    for (auto& i : c.items) i = subst_tvar(i, var, repl);
    if (c.next) c.next = subst_tvar(c.next, var, repl);
    for (auto& l : c.labels) l.second = subst_tvar(l.second, var, repl);
    return make(std::move(c));
  }
  }
}

TypeP unfold(const TypeP& t) {
  if (t->kind != TKind::Rec) return t;
  return subst_tvar(t->next, t->var, t);
}

TypeP unfold_head(const TypeP& t) {
  TypeP x = t;
  for (int guard = 0; x->kind == TKind::Rec; ++guard) {
    if (guard > 64) throw TypeError("non-contractive recursive type " + show(t));
    x = unfold(x);
  }
  return x;
}

bool contractive(const TypeP& t) {
  if (!t) return true;
  if (t->kind == TKind::Rec) {
    const TypeP* b = &t->next;
    while ((*b)->kind == TKind::Rec) b = &(*b)->next;
    if ((*b)->kind == TKind::Var) return false;
  }
  for (auto& i : t->items)
    if (!contractive(i)) return false;
  if (t->next && !contractive(t->next)) return false;
  for (auto& l : t->labels)
    if (!contractive(l.second)) return false;
  return true;
}

namespace {

using Assumptions = std::set<std::pair<std::string, std::string>>;

bool eq(const TypeP& a, const TypeP& b, Assumptions& as) {
  if (a == b) return true;
  if (a->kind == TKind::Rec || b->kind == TKind::Rec) {
    auto key = std::make_pair(show(a), show(b));
    if (as.count(key)) return true;
    as.insert(key);
    return eq(unfold(a), unfold(b), as);
  }
  if (a->kind != b->kind) return false;
  switch (a->kind) {
  case TKind::End:
  case TKind::Int:
  case TKind::Bool:
    return true;
  case TKind::Var: return a->var == b->var;
  case TKind::Sel:
  case TKind::Bra: {
    if (a->labels.size() != b->labels.size()) return false;
    for (auto& [l, s] : a->labels) {
      auto it = std::find_if(b->labels.begin(), b->labels.end(), [&](auto& p) { return p.first == l; });
      if (it == b->labels.end() || !eq(s, it->second, as)) return false;
    }
    return true;
  }
  default:
    if (a->items.size() != b->items.size()) return false;
    for (std::size_t i = 0; i < a->items.size(); ++i)
      if (!eq(a->items[i], b->items[i], as)) return false;
    if (a->next || b->next) {
      if (!a->next || !b->next) return false;
      return eq(a->next, b->next, as);
    }
    return true;
  }
}

} // namespace

bool type_equal(const TypeP& a, const TypeP& b) {
  if (!a || !b) return a == b;
  Assumptions as;
  return eq(a, b, as);
}

bool type_equal(const TypeList& a, const TypeList& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!type_equal(a[i], b[i])) return false;
  return true;
}

namespace {

TypeList close_payload(const TypeList& us, const std::map<std::string, TypeP>& env) {
  TypeList out;
  for (auto& u : us) {
    TypeP x = u;
    for (auto& [v, r] : env)
      if (free_tvars(x).count(v)) x = subst_tvar(x, v, r);
    out.push_back(x);
  }
  return out;
}

// Payload occurrences of a recursion variable keep denoting the original
// recursive type, so they are closed before the prefix is flipped.
TypeP dual_in(const TypeP& s, std::map<std::string, TypeP>& env) {
  switch (s->kind) {
  case TKind::End:
  case TKind::Var:
    return s;
  case TKind::Out: return t_in(close_payload(s->items, env), dual_in(s->next, env));
  case TKind::In: return t_out(close_payload(s->items, env), dual_in(s->next, env));
  case TKind::Sel:
  case TKind::Bra: {
    Labels ls;
    for (auto& [l, c] : s->labels) ls.emplace_back(l, dual_in(c, env));
    return s->kind == TKind::Sel ? t_bra(std::move(ls)) : t_sel(std::move(ls));
  }
  case TKind::Rec: {
    auto saved = env.find(s->var) != env.end() ? std::optional<TypeP>(env[s->var]) : std::nullopt;
    env[s->var] = s;
    TypeP body = dual_in(s->next, env);
    if (saved)
      env[s->var] = *saved;
    else
      env.erase(s->var);
    if (!free_tvars(body).count(s->var)) return body;
    return t_rec(s->var, body);
  }
  default:
    throw TypeError("dual of a non-session type " + show(s));
  }
}

} // namespace

TypeP dual(const TypeP& s) {
  std::map<std::string, TypeP> env;
  return dual_in(s, env);
}

namespace {

bool minimal_session(const TypeP& s);

bool minimal_any(const TypeP& t) {
  switch (t->kind) {
  case TKind::Int:
  case TKind::Bool:
    return true;
  case TKind::Chan: return minimal_any(t->items[0]);
  case TKind::Lin:
  case TKind::Sh:
    return std::all_of(t->items.begin(), t->items.end(), minimal_any);
  default:
    return minimal_session(t);
  }
}

bool minimal_session(const TypeP& s) {
  switch (s->kind) {
  case TKind::End:
  case TKind::Var:
    return true;
  case TKind::Out:
  case TKind::In:
    if (s->next->kind != TKind::End && s->next->kind != TKind::Var) return false;
    return std::all_of(s->items.begin(), s->items.end(), minimal_any);
  case TKind::Sel:
  case TKind::Bra:
    return std::all_of(s->labels.begin(), s->labels.end(), [](auto& l) { return minimal_session(l.second); });
  case TKind::Rec: return s->next->kind != TKind::Var && minimal_session(s->next);
  default:
    return false;
  }
}

} // namespace

bool is_minimal(const TypeP& t) { return t && minimal_any(t); }

namespace {

bool prefix_chain_to(const TypeP& s, const std::string& var) {
  const Type* x = s.get();
  bool any = false;
  while (x->kind == TKind::Out || x->kind == TKind::In) {
    for (auto& u : x->items)
      if (free_tvars(u).count(var)) return false;
    any = true;
    x = x->next.get();
  }
  return any && x->kind == TKind::Var && x->var == var;
}

} // namespace

bool is_tail_recursive(const TypeP& s) {
  return s->kind == TKind::Rec && prefix_chain_to(s->next, s->var);
}

bool is_rec_unfolding(const TypeP& s) {
  std::vector<TypeP> prefixes;
  TypeP x = s;
  while (x->kind == TKind::Out || x->kind == TKind::In) {
    prefixes.push_back(x);
    x = x->next;
  }
  if (!is_tail_recursive(x)) return false;
  std::vector<TypeP> body;
  for (TypeP b = x->next; b->kind == TKind::Out || b->kind == TKind::In; b = b->next) body.push_back(b);
  if (prefixes.size() > body.size()) return false;
  std::size_t off = body.size() - prefixes.size();
  for (std::size_t i = 0; i < prefixes.size(); ++i) {
    if (prefixes[i]->kind != body[off + i]->kind) return false;
    if (!type_equal(prefixes[i]->items, body[off + i]->items)) return false;
  }
  return true;
}

TypeP gdecomp_value(const TypeP& u) {
  switch (u->kind) {
  case TKind::Int:
  case TKind::Bool:
    return u;
  case TKind::Lin:
  case TKind::Sh: {
    TypeList ps;
    for (auto& c : u->items) {
      TypeList g = gdecomp(c);
      ps.insert(ps.end(), g.begin(), g.end());
    }
    return u->kind == TKind::Lin ? t_lin(std::move(ps)) : t_sh(std::move(ps));
  }
  case TKind::Var:
    return u;
  default:
    throw TypeError("not a value type: " + show(u));
  }
}

namespace {

TypeList g_payload(const TypeList& us) {
  TypeList out;
  for (auto& u : us) out.push_back(gdecomp_value(u));
  return out;
}

TypeList g_session(const TypeP& s) {
  switch (s->kind) {
  case TKind::End: return {t_end()};
  case TKind::Var: return {s};
  case TKind::Out:
  case TKind::In: {
    TypeP head = s->kind == TKind::Out ? t_out(g_payload(s->items), t_end()) : t_in(g_payload(s->items), t_end());
    TypeList out{head};
    if (s->next->kind != TKind::End) {
      TypeList rest = g_session(s->next);
      out.insert(out.end(), rest.begin(), rest.end());
    }
    return out;
  }
  case TKind::Bra: {
    Labels ls;
    for (auto& [l, c] : s->labels) ls.emplace_back(l, t_out({t_lin(g_session(c))}, t_end()));
    return {t_bra(std::move(ls))};
  }
  case TKind::Sel: {
    Labels ls;
    for (auto& [l, c] : s->labels) ls.emplace_back(l, t_in({t_lin(g_session(dual(c)))}, t_end()));
    return {t_sel(std::move(ls))};
  }
  case TKind::Rec: {
    if (!contractive(s)) throw TypeError("non-contractive recursion: " + show(s));
    if (is_tail_recursive(s)) return rdecomp(s->next);
    TypeList body = g_session(s->next);
    if (body.size() != 1) throw TypeError("unsupported non-tail-recursive type: " + show(s));
    return {t_rec(s->var, body[0])};
  }
  default:
    throw TypeError("not a session type: " + show(s));
  }
}

} // namespace

TypeList gdecomp(const TypeP& t) {
  if (is_session(t)) return g_session(t);
  if (t->kind == TKind::Chan) return {t_chan(gdecomp_value(t->items[0]))};
  return {gdecomp_value(t)};
}

TypeList rdecomp(const TypeP& body) {
  TypeP cur = body;
  while (cur->kind == TKind::Out || cur->kind == TKind::In) cur = cur->next;
  if (cur->kind != TKind::Var) throw TypeError("not a tail-recursive body: " + show(body));
  const std::string var = cur->var;
  TypeList out;
  for (TypeP c = body; c->kind == TKind::Out || c->kind == TKind::In; c = c->next) {
    TypeP pre = c->kind == TKind::Out ? t_out(g_payload(c->items), t_var(var)) : t_in(g_payload(c->items), t_var(var));
    out.push_back(t_rec(var, pre));
  }
  return out;
}

TypeList rsdecomp(const TypeP& s) {
  TypeP x = s;
  while (x->kind == TKind::Out || x->kind == TKind::In) x = x->next;
  if (x->kind != TKind::Rec || !is_tail_recursive(x)) throw TypeError("no tail-recursive type reachable in " + show(s));
  return rdecomp(x->next);
}

int findex(const TypeP& s) {
  TypeP x = s;
  if (x->kind == TKind::Rec) x = unfold(x);
  int l = 0;
  while (x->kind == TKind::Out || x->kind == TKind::In) {
    ++l;
    x = x->next;
  }
  if (x->kind != TKind::Rec || !is_tail_recursive(x)) throw TypeError("findex of a non-recursive type " + show(s));
  return static_cast<int>(rdecomp(x->next).size()) - l + 1;
}

std::size_t decomp_len(const TypeP& c) {
  if (is_session(c)) {
    if (is_rec_unfolding(c)) return rsdecomp(c).size();
    return gdecomp(c).size();
  }
  return 1;
}

SessionEnv envdecomp(const SessionEnv& env) {
  SessionEnv out;
  for (auto& e : env) {
    if (!is_session(e.type)) {
      EnvEntry d = e;
      d.type = gdecomp(e.type)[0];
      out.push_back(d);
      continue;
    }
    if (e.index <= 0) throw TypeError("unindexed session entry " + e.name);
    TypeList g = is_rec_unfolding(e.type) ? rsdecomp(e.type) : gdecomp(e.type);
    for (std::size_t i = 0; i < g.size(); ++i) {
      EnvEntry d = e;
      d.index = e.index + static_cast<int>(i);
      d.name = (e.dual ? "~" : "") + e.base + "_" + std::to_string(d.index);
      d.type = g[i];
      out.push_back(d);
    }
  }
  return out;
}

namespace {

const EnvEntry* partner(const SessionEnv& env, const EnvEntry& e) {
  for (auto& o : env)
    if (o.base == e.base && o.index == e.index && o.dual != e.dual) return &o;
  return nullptr;
}

} // namespace

bool balanced(const SessionEnv& env) {
  for (auto& e : env) {
    if (!is_session(e.type)) continue;
    const EnvEntry* p = partner(env, e);
    if (p && !type_equal(dual(e.type), p->type)) return false;
  }
  return true;
}

std::vector<SessionEnv> env_step(const SessionEnv& env) {
  std::vector<SessionEnv> out;
  for (std::size_t i = 0; i < env.size(); ++i) {
    const EnvEntry& e = env[i];
    if (e.dual || !is_session(e.type)) continue;
    const EnvEntry* p = partner(env, e);
    if (!p) continue;
    std::size_t j = static_cast<std::size_t>(p - env.data());
    TypeP a = unfold_head(e.type);
    TypeP b = unfold_head(p->type);
    auto emit = [&](TypeP na, TypeP nb) {
      SessionEnv n = env;
      n[i].type = na;
      n[j].type = nb;
      out.push_back(std::move(n));
    };
    if ((a->kind == TKind::Out && b->kind == TKind::In) || (a->kind == TKind::In && b->kind == TKind::Out)) {
      if (type_equal(a->items, b->items)) emit(a->next, b->next);
    } else if (a->kind == TKind::Sel && b->kind == TKind::Bra) {
      for (auto& [l, s] : a->labels)
        for (auto& [m, r] : b->labels)
          if (l == m) emit(s, r);
    } else if (a->kind == TKind::Bra && b->kind == TKind::Sel) {
      for (auto& [l, s] : b->labels)
        for (auto& [m, r] : a->labels)
          if (l == m) emit(r, s);
    }
  }
  return out;
}

} // namespace hodecomp
