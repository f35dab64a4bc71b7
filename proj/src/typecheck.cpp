#include "hodecomp/typecheck.hpp"

#include <algorithm>
#include <optional>
#include <set>

#include "hodecomp/syntax.hpp"

namespace hodecomp {

namespace {

struct Failure {
  Diagnostic d;
};

struct Entry {
  TypeP type;
  bool touched = false;
};

bool is_end(const TypeP& t) { return unfold_head(t)->kind == TKind::End; }

bool value_compatible(const TypeP& expected, const TypeP& actual) {
  if (type_equal(expected, actual)) return true;
  if (expected->kind == TKind::Lin && actual->kind == TKind::Sh) return type_equal(expected->items, actual->items);
  return false;
}

struct Checker {
  std::map<Name, TypeP> gnames;
  std::map<std::string, TypeP> gvars;
  std::map<std::string, TypeP> lam;
  std::map<Name, Entry> delta;
  std::vector<std::string> path;
  bool minimal = false;

  [[noreturn]] void fail(const std::string& rule, const std::string& msg) const {
    std::string p;
    for (auto& s : path) p += (p.empty() ? "" : "/") + s;
    throw Failure{Diagnostic{p.empty() ? "." : p, rule, msg}};
  }

  struct Seg {
    Checker& c;
    Seg(Checker& c, std::string s) : c(c) { c.path.push_back(std::move(s)); }
    ~Seg() { c.path.pop_back(); }
  };

  void need_minimal(const TypeP& t, const std::string& what) const {
    if (minimal && t && !is_minimal(t)) fail("Minimal", what + " has non-minimal type " + show(t));
  }

  std::map<Name, bool> reset_touched() {
    std::map<Name, bool> saved;
    for (auto& [n, e] : delta) {
      saved[n] = e.touched;
      e.touched = false;
    }
    return saved;
  }
  void merge_touched(const std::map<Name, bool>& saved) {
    for (auto& [n, e] : delta) {
      auto it = saved.find(n);
      if (it != saved.end()) e.touched = e.touched || it->second;
    }
  }

  // Entries touched since reset must be complete; they leave the environment.
  void close_touched(const std::string& rule, const std::set<Name>& keep = {}) {
    for (auto it = delta.begin(); it != delta.end();) {
      if (it->second.touched && !keep.count(it->first)) {
        if (!is_end(it->second.type))
          fail(rule, "session " + print_name(it->first) + " left incomplete at type " + show(it->second.type));
        it = delta.erase(it);
      } else {
        ++it;
      }
    }
  }

  TypeP var_type(const std::string& x) {
    if (auto it = lam.find(x); it != lam.end()) {
      TypeP t = it->second;
      lam.erase(it);
      return t;
    }
    if (auto it = gvars.find(x); it != gvars.end()) return it->second;
    fail("Var", "unbound or already consumed variable " + x);
  }

  TypeP value(const ValP& v) {
    if (auto x = as<VarV>(v)) return var_type(x->id);
    if (auto x = as<Lit>(v)) return std::holds_alternative<bool>(x->v) ? t_bool() : t_int();
    if (auto x = as<NameV>(v)) fail("Value", "name " + print_name(x->name) + " used as a value");
    const AbsV& a = std::get<AbsV>(v->v);
    Seg seg(*this, "abs");
    auto saved_touch = reset_touched();
    auto lam_before = lam;
    std::vector<std::pair<Name, std::optional<Entry>>> saved_d;
    std::vector<std::pair<Name, std::optional<TypeP>>> saved_g;
    TypeList params;
    std::set<Name> own;
    for (auto& b : a.params) {
      if (!b.type) fail("Abs", "binder " + print_name(b.name) + " lacks a type annotation");
      need_minimal(b.type, "binder " + print_name(b.name));
      params.push_back(b.type);
      if (is_session(b.type)) {
        auto it = delta.find(b.name);
        saved_d.emplace_back(b.name, it == delta.end() ? std::nullopt : std::optional<Entry>(it->second));
        delta[b.name] = Entry{b.type, false};
        own.insert(b.name);
      } else {
        auto it = gnames.find(b.name);
        saved_g.emplace_back(b.name, it == gnames.end() ? std::nullopt : std::optional<TypeP>(it->second));
        gnames[b.name] = b.type;
      }
    }
    {
      Seg body(*this, "body");
      proc(a.body);
    }
    for (auto& n : own) {
      auto it = delta.find(n);
      if (it != delta.end()) {
        if (!is_end(it->second.type)) fail("Abs", "binder " + print_name(n) + " left at type " + show(it->second.type));
        delta.erase(it);
      }
    }
    if (a.lin == Lin::sh) {
      if (lam.size() != lam_before.size()) fail("Prom", "shared abstraction uses linear variables");
      for (auto& [n, e] : delta)
        if (e.touched) fail("Prom", "shared abstraction uses session " + print_name(n));
    } else {
      close_touched("Abs");
    }
    for (auto& [n, e] : saved_d)
      if (e) delta[n] = *e;
    for (auto& [n, t] : saved_g) {
      if (t)
        gnames[n] = *t;
      else
        gnames.erase(n);
    }
    merge_touched(saved_touch);
    return a.lin == Lin::lin ? t_lin(params) : t_sh(params);
  }

  Entry* session(const Name& n) {
    auto it = delta.find(n);
    return it == delta.end() ? nullptr : &it->second;
  }

  std::optional<TypeP> shared_name(const Name& n) {
    auto it = gnames.find(n);
    if (it == gnames.end()) return std::nullopt;
    return it->second;
  }

  void bind_inputs(const std::vector<std::string>& bs, const TypeList& ts, const ProcP& cont, const std::string& rule) {
    std::vector<std::tuple<std::string, std::optional<TypeP>, std::optional<TypeP>>> saved;
    for (std::size_t i = 0; i < bs.size(); ++i) {
      auto l = lam.find(bs[i]);
      auto g = gvars.find(bs[i]);
      saved.emplace_back(bs[i], l == lam.end() ? std::nullopt : std::optional<TypeP>(l->second),
                         g == gvars.end() ? std::nullopt : std::optional<TypeP>(g->second));
      lam.erase(bs[i]);
      gvars.erase(bs[i]);
      if (ts[i]->kind == TKind::Lin)
        lam[bs[i]] = ts[i];
      else if (ts[i]->kind == TKind::Sh || is_base(ts[i]))
        gvars[bs[i]] = ts[i];
      else
        fail(rule, "received payload of non-value type " + show(ts[i]));
    }
    {
      Seg s(*this, "cont");
      proc(cont);
    }
    for (auto& b : bs) {
      if (lam.count(b)) fail(rule, "linear variable " + b + " is never used");
      gvars.erase(b);
    }
    for (auto& [b, l, g] : saved) {
      if (l) lam[b] = *l;
      if (g) gvars[b] = *g;
    }
  }

  void proc(const ProcP& p) {
    std::visit(
        [&](auto&& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Output>) {
            if (Entry* e = session(x.subj)) {
              TypeP t = unfold_head(e->type);
              if (t->kind != TKind::Out) fail("Send", print_name(x.subj) + " has type " + show(e->type) + ", not an output");
              if (t->items.size() != x.payload.size()) fail("Send", "payload arity mismatch on " + print_name(x.subj));
              e->type = t->next;
              e->touched = true;
              for (std::size_t i = 0; i < x.payload.size(); ++i) {
                Seg s(*this, "payload[" + std::to_string(i) + "]");
                TypeP u = value(x.payload[i]);
                if (!value_compatible(t->items[i], u))
                  fail("Send", "payload of type " + show(u) + " where " + show(t->items[i]) + " expected on " + print_name(x.subj));
              }
            } else if (auto c = shared_name(x.subj)) {
              if ((*c)->kind != TKind::Chan) fail("Req", print_name(x.subj) + " is not a channel");
              if (x.payload.size() != 1) fail("Req", "shared names carry exactly one value");
              Seg s(*this, "payload[0]");
              TypeP u = value(x.payload[0]);
              if (!value_compatible((*c)->items[0], u))
                fail("Req", "payload of type " + show(u) + " where " + show((*c)->items[0]) + " expected on " + print_name(x.subj));
            } else {
              fail("Send", "unknown or consumed name " + print_name(x.subj));
            }
            Seg s(*this, "cont");
            proc(x.cont);
          } else if constexpr (std::is_same_v<T, Input>) {
            if (Entry* e = session(x.subj)) {
              TypeP t = unfold_head(e->type);
              if (t->kind != TKind::In) fail("Rcv", print_name(x.subj) + " has type " + show(e->type) + ", not an input");
              if (t->items.size() != x.binders.size()) fail("Rcv", "binder arity mismatch on " + print_name(x.subj));
              e->type = t->next;
              e->touched = true;
              bind_inputs(x.binders, t->items, x.cont, "Rcv");
            } else if (auto c = shared_name(x.subj)) {
              if ((*c)->kind != TKind::Chan) fail("Acc", print_name(x.subj) + " is not a channel");
              if (x.binders.size() != 1) fail("Acc", "shared names carry exactly one value");
              bind_inputs(x.binders, {(*c)->items[0]}, x.cont, "Acc");
            } else {
              fail("Rcv", "unknown or consumed name " + print_name(x.subj));
            }
          } else if constexpr (std::is_same_v<T, Select>) {
            Entry* e = session(x.subj);
            if (!e) fail("Sel", "unknown or consumed name " + print_name(x.subj));
            TypeP t = unfold_head(e->type);
            if (t->kind != TKind::Sel) fail("Sel", print_name(x.subj) + " has type " + show(e->type) + ", not a selection");
            auto it = std::find_if(t->labels.begin(), t->labels.end(), [&](auto& l) { return l.first == x.label; });
            if (it == t->labels.end()) fail("Sel", "label " + x.label + " not offered by " + show(e->type));
            e->type = it->second;
            e->touched = true;
            Seg s(*this, "cont");
            proc(x.cont);
          } else if constexpr (std::is_same_v<T, Branch>) {
            Entry* e = session(x.subj);
            if (!e) fail("Bra", "unknown or consumed name " + print_name(x.subj));
            TypeP t = unfold_head(e->type);
            if (t->kind != TKind::Bra) fail("Bra", print_name(x.subj) + " has type " + show(e->type) + ", not a branching");
            if (t->labels.size() != x.cases.size()) fail("Bra", "label sets differ from " + show(e->type));
            auto g0 = gnames;
            auto gv0 = gvars;
            auto l0 = lam;
            auto d0 = delta;
            std::optional<std::pair<std::map<std::string, TypeP>, std::map<Name, Entry>>> first;
            for (auto& [l, q] : x.cases) {
              auto it = std::find_if(t->labels.begin(), t->labels.end(), [&](auto& m) { return m.first == l; });
              if (it == t->labels.end()) fail("Bra", "label " + l + " not in " + show(e->type));
              gnames = g0;
              gvars = gv0;
              lam = l0;
              delta = d0;
              delta[x.subj].type = it->second;
              delta[x.subj].touched = true;
              {
                Seg s(*this, "case[" + l + "]");
                proc(q);
              }
              if (!first) {
                first.emplace(lam, delta);
                continue;
              }
              if (lam.size() != first->first.size()) fail("Bra", "branches consume different linear variables");
              for (auto& [v, ty] : lam)
                if (!first->first.count(v)) fail("Bra", "branches consume different linear variables");
              if (delta.size() != first->second.size()) fail("Bra", "branches use different sessions");
              for (auto& [n, en] : delta) {
                auto f = first->second.find(n);
                if (f == first->second.end() || !type_equal(f->second.type, en.type))
                  fail("Bra", "branches leave " + print_name(n) + " at different types");
                f->second.touched = f->second.touched || en.touched;
              }
            }
            lam = first->first;
            delta = first->second;
            gnames = g0;
            gvars = gv0;
          } else if constexpr (std::is_same_v<T, App>) {
            TypeP f;
            {
              Seg s(*this, "fun");
              f = value(x.fun);
            }
            if (!is_arrow(f)) fail("App", "applied value has type " + show(f));
            if (f->items.size() != x.args.size()) fail("App", "argument count mismatch for " + show(f));
            for (std::size_t i = 0; i < x.args.size(); ++i) {
              const TypeP& c = f->items[i];
              if (auto l = std::get_if<Lit>(&x.args[i])) {
                TypeP lt = std::holds_alternative<bool>(l->v) ? t_bool() : t_int();
                if (!type_equal(lt, c)) fail("App", "literal where " + show(c) + " expected");
                continue;
              }
              const Name& n = std::get<Name>(x.args[i]);
              if (auto it = delta.find(n); it != delta.end()) {
                if (!type_equal(it->second.type, c))
                  fail("App", print_name(n) + " has type " + show(it->second.type) + " where " + show(c) + " expected");
                delta.erase(it);
              } else if (auto g = shared_name(n)) {
                if (!type_equal(*g, c)) fail("App", print_name(n) + " has type " + show(*g) + " where " + show(c) + " expected");
              } else {
                fail("App", "unknown or consumed name " + print_name(n));
              }
            }
          } else if constexpr (std::is_same_v<T, Par>) {
            auto saved = reset_touched();
            {
              Seg s(*this, "left");
              proc(x.left);
            }
            close_touched("Par");
            merge_touched(saved);
            Seg s(*this, "right");
            proc(x.right);
          } else if constexpr (std::is_same_v<T, Res>) {
            if (!x.type) fail("Res", "restriction of " + print_name(x.name) + " lacks a type annotation");
            need_minimal(x.type, "restriction " + print_name(x.name));
            Seg s(*this, "new " + print_name(x.name));
            if (x.type->kind == TKind::Chan) {
              auto old = shared_name(x.name);
              gnames[x.name] = x.type;
              proc(x.body);
              if (old)
                gnames[x.name] = *old;
              else
                gnames.erase(x.name);
            } else if (is_session(x.type)) {
              Name a = x.name.plain();
              Name b = a.co();
              auto oa = delta.count(a) ? std::optional<Entry>(delta[a]) : std::nullopt;
              auto ob = delta.count(b) ? std::optional<Entry>(delta[b]) : std::nullopt;
              delta[a] = Entry{x.type, false};
              delta[b] = Entry{dual(x.type), false};
              proc(x.body);
              for (const Name& n : {a, b}) {
                auto it = delta.find(n);
                if (it != delta.end()) {
                  if (!is_end(it->second.type))
                    fail("ResS", "session " + print_name(n) + " left at type " + show(it->second.type));
                  delta.erase(it);
                }
              }
              if (oa) delta[a] = *oa;
              if (ob) delta[b] = *ob;
            } else {
              fail("Res", "restriction of " + print_name(x.name) + " at non-channel type " + show(x.type));
            }
          }
        },
        p->v);
  }

  void load(const TypeEnvs& e) {
    gnames = e.gamma_names;
    gvars = e.gamma_vars;
    lam = e.lambda;
    for (auto& [n, t] : e.delta) delta[n] = Entry{t, false};
    for (auto& [n, t] : e.gamma_names) need_minimal(t, "environment entry " + print_name(n));
    for (auto& [n, t] : e.delta) need_minimal(t, "environment entry " + print_name(n));
    for (auto& [v, t] : e.lambda) need_minimal(t, "environment entry " + v);
    for (auto& [v, t] : e.gamma_vars) need_minimal(t, "environment entry " + v);
  }

  TypeEnvs leftover() const {
    TypeEnvs e;
    e.gamma_names = gnames;
    e.gamma_vars = gvars;
    e.lambda = lam;
    for (auto& [n, en] : delta) e.delta[n] = en.type;
    return e;
  }
};

CheckResult run(const TypeEnvs& envs, const ProcP& p, bool minimal) {
  Checker c;
  c.minimal = minimal;
  CheckResult r;
  try {
    c.load(envs);
    c.proc(p);
    r.leftover = c.leftover();
    if (!c.lam.empty()) c.fail("Nil", "linear variable " + c.lam.begin()->first + " is never used");
    for (auto& [n, e] : c.delta)
      if (!is_end(e.type)) c.fail("End", "session " + print_name(n) + " left at type " + show(e.type));
  } catch (const Failure& f) {
    r.ok = false;
    r.diagnostics.push_back(f.d);
  } catch (const TypeError& t) {
    r.ok = false;
    r.diagnostics.push_back(Diagnostic{".", "Type", t.what()});
  }
  return r;
}

} // namespace

TypeEnvs envs_from_decls(const std::vector<std::pair<Name, TypeP>>& decls) {
  TypeEnvs e;
  for (auto& [n, t] : decls) {
    if (t->kind == TKind::Chan)
      e.gamma_names[n] = t;
    else if (is_session(t))
      e.delta[n] = t;
    else if (is_base(t))
      e.gamma_names[n] = t;
    else if (t->kind == TKind::Lin)
      e.lambda[n.base] = t;
    else
      e.gamma_vars[n.base] = t;
  }
  return e;
}

CheckResult check_process(const TypeEnvs& envs, const ProcP& p) { return run(envs, p, false); }

std::pair<TypeP, CheckResult> check_value(const TypeEnvs& envs, const ValP& v) {
  Checker c;
  CheckResult r;
  TypeP t;
  try {
    c.load(envs);
    t = c.value(v);
    r.leftover = c.leftover();
  } catch (const Failure& f) {
    r.ok = false;
    r.diagnostics.push_back(f.d);
  } catch (const TypeError& e) {
    r.ok = false;
    r.diagnostics.push_back(Diagnostic{".", "Type", e.what()});
  }
  return {t, r};
}

CheckResult check_minimal_typed(const ProcP& p, const TypeEnvs& envs) { return run(envs, p, true); }

std::string to_string(const Diagnostic& d) { return d.path + ": [" + d.rule + "] " + d.message; }

} // namespace hodecomp
