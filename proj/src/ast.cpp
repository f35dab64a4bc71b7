#include "hodecomp/ast.hpp"

#include <algorithm>
#include <atomic>
#include <functional>

namespace hodecomp {

Name Name::co() const {
  if (shared) return *this;
  Name n = *this;
  n.dual = !dual;
  return n;
}

Name Name::with_index(int i) const {
  Name n = *this;
  n.index = i;
  return n;
}

Name Name::plain() const {
  Name n = *this;
  n.dual = false;
  return n;
}

bool Name::propagator() const { return base == "#"; }
bool Name::rec_propagator() const { return base.rfind("#rec:", 0) == 0; }
bool Name::reserved() const { return !base.empty() && (base[0] == '#' || base.find('%') != std::string::npos); }

Name prop(int k, bool dual) { return Name{"#", k, dual, false}; }

Name rec_prop(const Name& r) { return Name{"#rec:" + std::string(r.dual ? "~" : "") + r.base, 0, false, true}; }

std::string fresh_suffix() {
  static std::atomic<long> n{0};
  return "%" + std::to_string(++n);
}

namespace mk {
ProcP nil() {
  static const ProcP z = std::make_shared<const Process>(Process{Inact{}});
  return z;
}
ProcP out(Name s, std::vector<ValP> payload, ProcP cont) {
  return std::make_shared<const Process>(Process{Output{std::move(s), std::move(payload), std::move(cont)}});
}
ProcP in(Name s, std::vector<std::string> binders, ProcP cont) {
  return std::make_shared<const Process>(Process{Input{std::move(s), std::move(binders), std::move(cont)}});
}
ProcP sel(Name s, std::string label, ProcP cont) {
  return std::make_shared<const Process>(Process{Select{std::move(s), std::move(label), std::move(cont)}});
}
ProcP bra(Name s, std::vector<std::pair<std::string, ProcP>> cases) {
  return std::make_shared<const Process>(Process{Branch{std::move(s), std::move(cases)}});
}
ProcP app(ValP fun, std::vector<Arg> args) {
  return std::make_shared<const Process>(Process{App{std::move(fun), std::move(args)}});
}
ProcP par(ProcP l, ProcP r) { return std::make_shared<const Process>(Process{Par{std::move(l), std::move(r)}}); }
ProcP par(const std::vector<ProcP>& ps) {
  if (ps.empty()) return nil();
  ProcP acc = ps.back();
  for (std::size_t i = ps.size() - 1; i-- > 0;) acc = par(ps[i], acc);
  return acc;
}
ProcP res(Name n, TypeP t, ProcP body) {
  n.dual = false;
  return std::make_shared<const Process>(Process{Res{std::move(n), std::move(t), std::move(body)}});
}
ProcP res(const std::vector<std::pair<Name, TypeP>>& ns, ProcP body) {
  ProcP acc = std::move(body);
  for (std::size_t i = ns.size(); i-- > 0;) acc = res(ns[i].first, ns[i].second, acc);
  return acc;
}
ValP var(std::string id) { return std::make_shared<const Value>(Value{VarV{std::move(id)}}); }
ValP abs(std::vector<Binder> params, Lin lin, ProcP body) {
  return std::make_shared<const Value>(Value{AbsV{std::move(params), lin, std::move(body)}});
}
ValP lit(std::int64_t i) { return std::make_shared<const Value>(Value{Lit{i}}); }
ValP lit(bool b) { return std::make_shared<const Value>(Value{Lit{b}}); }
ValP name(Name n) { return std::make_shared<const Value>(Value{NameV{std::move(n)}}); }
} // namespace mk

namespace {

struct FreeWalker {
  std::vector<std::string> vars;
  std::vector<Name> names;
  std::set<std::string> seen_vars;
  std::set<Name> seen_names;
  std::multiset<std::string> bound_vars;
  std::multiset<std::pair<std::string, int>> bound_names;

  void name(const Name& n) {
    if (bound_names.count({n.base, n.index})) return;
    if (seen_names.insert(n).second) names.push_back(n);
  }
  void var(const std::string& x) {
    if (bound_vars.count(x)) return;
    if (seen_vars.insert(x).second) vars.push_back(x);
  }
  void val(const ValP& v) {
    std::visit(
        [&](auto&& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, VarV>) {
            var(x.id);
          } else if constexpr (std::is_same_v<T, NameV>) {
            name(x.name);
          } else if constexpr (std::is_same_v<T, AbsV>) {
            for (auto& b : x.params) bound_names.insert({b.name.base, b.name.index});
            proc(x.body);
            for (auto& b : x.params) bound_names.erase(bound_names.find({b.name.base, b.name.index}));
          }
        },
        v->v);
  }
  void proc(const ProcP& p) {
    std::visit(
        [&](auto&& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Output>) {
            name(x.subj);
            for (auto& v : x.payload) val(v);
            proc(x.cont);
          } else if constexpr (std::is_same_v<T, Input>) {
            name(x.subj);
            for (auto& b : x.binders) {
              bound_vars.insert(b);
              bound_names.insert({b, 0});
            }
            proc(x.cont);
            for (auto& b : x.binders) {
              bound_vars.erase(bound_vars.find(b));
              bound_names.erase(bound_names.find({b, 0}));
            }
          } else if constexpr (std::is_same_v<T, Select>) {
            name(x.subj);
            proc(x.cont);
          } else if constexpr (std::is_same_v<T, Branch>) {
            name(x.subj);
            for (auto& c : x.cases) proc(c.second);
          } else if constexpr (std::is_same_v<T, App>) {
            val(x.fun);
            for (auto& a : x.args)
              if (auto n = std::get_if<Name>(&a)) name(*n);
          } else if constexpr (std::is_same_v<T, Par>) {
            proc(x.left);
            proc(x.right);
          } else if constexpr (std::is_same_v<T, Res>) {
            bound_names.insert({x.name.base, x.name.index});
            proc(x.body);
            bound_names.erase(bound_names.find({x.name.base, x.name.index}));
          }
        },
        p->v);
  }
};

} // namespace

std::vector<std::string> free_vars(const ProcP& p) {
  FreeWalker w;
  w.proc(p);
  return w.vars;
}
std::vector<std::string> free_vars(const ValP& v) {
  FreeWalker w;
  w.val(v);
  return w.vars;
}
std::vector<Name> free_names(const ProcP& p) {
  FreeWalker w;
  w.proc(p);
  return w.names;
}
std::vector<Name> free_names(const ValP& v) {
  FreeWalker w;
  w.val(v);
  return w.names;
}

std::vector<Name> init_names(const std::vector<Name>& us) {
  std::vector<Name> out;
  for (auto& u : us) {
    if (u.index != 0) throw std::invalid_argument("init_names: name already indexed: " + u.base);
    out.push_back(u.with_index(1));
  }
  return out;
}

namespace {

struct Substituter {
  std::map<Name, Arg> names;
  std::map<std::string, ValP> vars;
  std::set<std::pair<std::string, int>> range_names;
  std::set<std::string> range_vars;
  bool refresh_all = false;

  void collect_range() {
    for (auto& [k, a] : names)
      if (auto n = std::get_if<Name>(&a)) range_names.insert({n->base, n->index});
    for (auto& [k, v] : vars) {
      for (auto& n : free_names(v)) range_names.insert({n.base, n.index});
      for (auto& x : free_vars(v)) range_vars.insert(x);
    }
  }

  Arg arg(const Arg& a) const {
    if (auto n = std::get_if<Name>(&a)) {
      auto it = names.find(*n);
      if (it != names.end()) return it->second;
    }
    return a;
  }
  Name subj(const Name& n) const {
    auto it = names.find(n);
    if (it != names.end())
      if (auto m = std::get_if<Name>(&it->second)) return *m;
    return n;
  }

  // Binds name n for the extent of a body; returns saved entries to restore.
  struct Saved {
    std::vector<std::pair<Name, std::optional<Arg>>> names;
    std::vector<std::pair<std::string, std::optional<ValP>>> vars;
  };
  void save_name(Saved& s, const Name& k) {
    auto it = names.find(k);
    s.names.emplace_back(k, it == names.end() ? std::nullopt : std::optional<Arg>(it->second));
    if (it != names.end()) names.erase(it);
  }
  void save_var(Saved& s, const std::string& k) {
    auto it = vars.find(k);
    s.vars.emplace_back(k, it == vars.end() ? std::nullopt : std::optional<ValP>(it->second));
    if (it != vars.end()) vars.erase(it);
  }
  void restore(Saved& s) {
    for (auto it = s.names.rbegin(); it != s.names.rend(); ++it) {
      names.erase(it->first);
      if (it->second) names.emplace(it->first, *it->second);
    }
    for (auto it = s.vars.rbegin(); it != s.vars.rend(); ++it) {
      vars.erase(it->first);
      if (it->second) vars.emplace(it->first, *it->second);
    }
  }

  Name bind_name(Saved& s, const Name& n) {
    Name p = n.plain();
    save_name(s, p);
    save_name(s, p.co());
    if (refresh_all || range_names.count({n.base, n.index})) {
      Name f = p;
      f.base = n.base + fresh_suffix();
      names[p] = f;
      if (!p.shared) names[p.co()] = f.co();
      p = f;
    }
    return p;
  }

  std::string bind_var(Saved& s, const std::string& x) {
    save_var(s, x);
    save_name(s, Name{x, 0, false, false});
    save_name(s, Name{x, 0, true, false});
    save_name(s, Name{x, 0, false, true});
    if (refresh_all || range_vars.count(x) || range_names.count({x, 0})) {
      std::string f = x + fresh_suffix();
      vars[x] = mk::var(f);
      names[Name{x, 0, false, false}] = Name{f, 0, false, false};
      names[Name{x, 0, true, false}] = Name{f, 0, true, false};
      return f;
    }
    return x;
  }

  ValP val(const ValP& v) {
    if (auto x = as<VarV>(v)) {
      auto it = vars.find(x->id);
      return it == vars.end() ? v : it->second;
    }
    if (auto x = as<NameV>(v)) {
      Arg a = arg(x->name);
      if (auto n = std::get_if<Name>(&a)) return mk::name(*n);
      return std::make_shared<const Value>(Value{std::get<Lit>(a)});
    }
    if (auto x = as<AbsV>(v)) {
      Saved s;
      std::vector<Binder> ps;
      for (auto& b : x->params) {
        Name n = bind_name(s, b.name);
        n.dual = false;
        n.shared = b.name.shared;
        ps.push_back(Binder{n, b.type});
      }
      ProcP body = proc(x->body);
      restore(s);
      return mk::abs(std::move(ps), x->lin, body);
    }
    return v;
  }

  ProcP proc(const ProcP& p) {
    return std::visit(
        [&](auto&& x) -> ProcP {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Output>) {
            std::vector<ValP> pay;
            for (auto& v : x.payload) pay.push_back(val(v));
            return mk::out(subj(x.subj), std::move(pay), proc(x.cont));
          } else if constexpr (std::is_same_v<T, Input>) {
            Name s = subj(x.subj);
            Saved sv;
            std::vector<std::string> bs;
            for (auto& b : x.binders) bs.push_back(bind_var(sv, b));
            ProcP c = proc(x.cont);
            restore(sv);
            return mk::in(s, std::move(bs), c);
          } else if constexpr (std::is_same_v<T, Select>) {
            return mk::sel(subj(x.subj), x.label, proc(x.cont));
          } else if constexpr (std::is_same_v<T, Branch>) {
            std::vector<std::pair<std::string, ProcP>> cs;
            for (auto& c : x.cases) cs.emplace_back(c.first, proc(c.second));
            return mk::bra(subj(x.subj), std::move(cs));
          } else if constexpr (std::is_same_v<T, App>) {
            std::vector<Arg> as;
            for (auto& a : x.args) as.push_back(arg(a));
            return mk::app(val(x.fun), std::move(as));
          } else if constexpr (std::is_same_v<T, Par>) {
            return mk::par(proc(x.left), proc(x.right));
          } else if constexpr (std::is_same_v<T, Res>) {
            Saved sv;
            Name n = bind_name(sv, x.name);
            n.shared = x.name.shared;
            ProcP b = proc(x.body);
            restore(sv);
            return mk::res(n, x.type, b);
          } else {
            return p;
          }
        },
        p->v);
  }
};

} // namespace

ProcP substitute(const ProcP& p, const Subst& s) {
  if (s.empty()) return p;
  Substituter w{s.names, s.vars, {}, {}, false};
  w.collect_range();
  return w.proc(p);
}

ValP substitute(const ValP& v, const Subst& s) {
  if (s.empty()) return v;
  Substituter w{s.names, s.vars, {}, {}, false};
  w.collect_range();
  return w.val(v);
}

ProcP refresh_binders(const ProcP& p) {
  Substituter w;
  w.refresh_all = true;
  return w.proc(p);
}

ValP refresh_binders(const ValP& v) {
  Substituter w;
  w.refresh_all = true;
  return w.val(v);
}

namespace {

// First free occurrence of the pair (base,index) in preorder; returns polarity.
std::optional<bool> first_polarity(const ProcP& p, const std::string& base, int index);

std::optional<bool> first_polarity_v(const ValP& v, const std::string& base, int index) {
  if (auto x = as<NameV>(v))
    if (x->name.base == base && x->name.index == index) return x->name.dual;
  if (auto x = as<AbsV>(v)) {
    for (auto& b : x->params)
      if (b.name.base == base && b.name.index == index) return std::nullopt;
    return first_polarity(x->body, base, index);
  }
  return std::nullopt;
}

std::optional<bool> first_polarity(const ProcP& p, const std::string& base, int index) {
  auto hit = [&](const Name& n) -> std::optional<bool> {
    if (n.base == base && n.index == index) return n.dual;
    return std::nullopt;
  };
  return std::visit(
      [&](auto&& x) -> std::optional<bool> {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Output>) {
          if (auto h = hit(x.subj)) return h;
          for (auto& v : x.payload)
            if (auto h = first_polarity_v(v, base, index)) return h;
          return first_polarity(x.cont, base, index);
        } else if constexpr (std::is_same_v<T, Input>) {
          if (auto h = hit(x.subj)) return h;
          if (index == 0 && std::find(x.binders.begin(), x.binders.end(), base) != x.binders.end()) return std::nullopt;
          return first_polarity(x.cont, base, index);
        } else if constexpr (std::is_same_v<T, Select>) {
          if (auto h = hit(x.subj)) return h;
          return first_polarity(x.cont, base, index);
        } else if constexpr (std::is_same_v<T, Branch>) {
          if (auto h = hit(x.subj)) return h;
          for (auto& c : x.cases)
            if (auto h = first_polarity(c.second, base, index)) return h;
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, App>) {
          if (auto h = first_polarity_v(x.fun, base, index)) return h;
          for (auto& a : x.args)
            if (auto n = std::get_if<Name>(&a))
              if (auto h = hit(*n)) return h;
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, Par>) {
          if (auto h = first_polarity(x.left, base, index)) return h;
          return first_polarity(x.right, base, index);
        } else if constexpr (std::is_same_v<T, Res>) {
          if (x.name.base == base && x.name.index == index) return std::nullopt;
          return first_polarity(x.body, base, index);
        } else {
          return std::nullopt;
        }
      },
      p->v);
}

struct Canon {
  int next = 0;
  std::map<std::pair<std::string, int>, std::pair<std::string, bool>> names; // -> (fresh base, flip)
  std::map<std::string, std::string> vars;

  Name name(const Name& n) const {
    auto it = names.find({n.base, n.index});
    if (it == names.end()) return n;
    Name m = n;
    m.base = it->second.first;
    m.index = 0;
    m.dual = n.shared ? false : (n.dual != it->second.second);
    return m;
  }

  template <class F> auto scoped(F&& f) {
    auto saved_n = names;
    auto saved_v = vars;
    auto r = f();
    names = std::move(saved_n);
    vars = std::move(saved_v);
    return r;
  }

  ValP val(const ValP& v) {
    if (auto x = as<VarV>(v)) {
      auto it = vars.find(x->id);
      return it == vars.end() ? v : mk::var(it->second);
    }
    if (auto x = as<NameV>(v)) return mk::name(name(x->name));
    if (auto x = as<AbsV>(v)) {
      return scoped([&] {
        std::vector<Binder> ps;
        for (auto& b : x->params) {
          std::string f = "_" + std::to_string(next++);
          names[{b.name.base, b.name.index}] = {f, false};
          ps.push_back(Binder{Name{f, 0, false, b.name.shared}, b.type});
        }
        return mk::abs(std::move(ps), x->lin, proc(x->body));
      });
    }
    return v;
  }

  ProcP proc(const ProcP& p) {
    return std::visit(
        [&](auto&& x) -> ProcP {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Output>) {
            std::vector<ValP> pay;
            for (auto& v : x.payload) pay.push_back(val(v));
            return mk::out(name(x.subj), std::move(pay), proc(x.cont));
          } else if constexpr (std::is_same_v<T, Input>) {
            return scoped([&] {
              std::vector<std::string> bs;
              for (auto& b : x.binders) {
                std::string f = "_v" + std::to_string(next++);
                vars[b] = f;
                names[{b, 0}] = {f, false};
                bs.push_back(f);
              }
              Name s = name(x.subj);
              return mk::in(s, std::move(bs), proc(x.cont));
            });
          } else if constexpr (std::is_same_v<T, Select>) {
            return mk::sel(name(x.subj), x.label, proc(x.cont));
          } else if constexpr (std::is_same_v<T, Branch>) {
            std::vector<std::pair<std::string, ProcP>> cs;
            for (auto& c : x.cases) cs.emplace_back(c.first, proc(c.second));
            return mk::bra(name(x.subj), std::move(cs));
          } else if constexpr (std::is_same_v<T, App>) {
            ValP f = val(x.fun);
            std::vector<Arg> as;
            for (auto& a : x.args) {
              if (auto n = std::get_if<Name>(&a))
                as.push_back(name(*n));
              else
                as.push_back(a);
            }
            return mk::app(f, std::move(as));
          } else if constexpr (std::is_same_v<T, Par>) {
            ProcP l = proc(x.left);
            return mk::par(l, proc(x.right));
          } else if constexpr (std::is_same_v<T, Res>) {
            return scoped([&] {
              std::string f = "_" + std::to_string(next++);
              bool flip = false;
              if (!x.name.shared) flip = first_polarity(x.body, x.name.base, x.name.index).value_or(false);
              names[{x.name.base, x.name.index}] = {f, flip};
              TypeP t = x.type && flip ? dual(x.type) : x.type;
              return mk::res(Name{f, 0, false, x.name.shared}, t, proc(x.body));
            });
          } else {
            return p;
          }
        },
        p->v);
  }
};

std::string name_key(const Name& n) {
  std::string s = n.dual ? "~" : "";
  s += n.base;
  if (n.index) s += "_" + std::to_string(n.index);
  return s;
}

std::string lit_key(const Lit& l) {
  if (auto b = std::get_if<bool>(&l.v)) return *b ? "true" : "false";
  return std::to_string(std::get<std::int64_t>(l.v));
}

} // namespace

ProcP canonical_rename(const ProcP& p) {
  Canon c;
  return c.proc(p);
}

std::string structural_key(const ValP& v) {
  return std::visit(
      [&](auto&& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, VarV>) {
          return x.id;
        } else if constexpr (std::is_same_v<T, NameV>) {
          return "@" + name_key(x.name);
        } else if constexpr (std::is_same_v<T, Lit>) {
          return lit_key(x);
        } else {
          std::string s = x.lin == Lin::lin ? "\\lin(" : "\\un(";
          for (std::size_t i = 0; i < x.params.size(); ++i) s += (i ? "," : "") + name_key(x.params[i].name);
          return s + ")->" + structural_key(x.body);
        }
      },
      v->v);
}

std::string structural_key(const ProcP& p) {
  return std::visit(
      [&](auto&& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Output>) {
          std::string s = name_key(x.subj) + "!(";
          for (std::size_t i = 0; i < x.payload.size(); ++i) s += (i ? "," : "") + structural_key(x.payload[i]);
          return s + ")." + structural_key(x.cont);
        } else if constexpr (std::is_same_v<T, Input>) {
          std::string s = name_key(x.subj) + "?(";
          for (std::size_t i = 0; i < x.binders.size(); ++i) s += (i ? "," : "") + x.binders[i];
          return s + ")." + structural_key(x.cont);
        } else if constexpr (std::is_same_v<T, Select>) {
          return "select " + name_key(x.subj) + " " + x.label + "." + structural_key(x.cont);
        } else if constexpr (std::is_same_v<T, Branch>) {
          std::string s = "branch " + name_key(x.subj) + "{";
          for (std::size_t i = 0; i < x.cases.size(); ++i) s += (i ? ";" : "") + x.cases[i].first + ":" + structural_key(x.cases[i].second);
          return s + "}";
        } else if constexpr (std::is_same_v<T, App>) {
          std::string s = "apply(" + structural_key(x.fun) + ")(";
          for (std::size_t i = 0; i < x.args.size(); ++i) {
            if (i) s += ",";
            if (auto n = std::get_if<Name>(&x.args[i]))
              s += name_key(*n);
            else
              s += lit_key(std::get<Lit>(x.args[i]));
          }
          return s + ")";
        } else if constexpr (std::is_same_v<T, Par>) {
          return "(" + structural_key(x.left) + "|" + structural_key(x.right) + ")";
        } else if constexpr (std::is_same_v<T, Res>) {
          return "new " + name_key(x.name) + " in (" + structural_key(x.body) + ")";
        } else {
          return "0";
        }
      },
      p->v);
}

bool alpha_eq(const ProcP& p, const ProcP& q) {
  return structural_key(canonical_rename(p)) == structural_key(canonical_rename(q));
}

bool alpha_eq(const ValP& v, const ValP& w) {
  ProcP a = mk::app(v, {});
  ProcP b = mk::app(w, {});
  return alpha_eq(a, b);
}

TypeP encode_type(const TypeP& t) {
  if (!t) return t;
  auto payload = [](const TypeList& us) {
    TypeList out;
    for (auto& u : us) {
      if (is_arrow(u))
        out.push_back(encode_type(u));
      else
        out.push_back(t_lin({t_in({t_lin({encode_type(u)})}, t_end())}));
    }
    return out;
  };
  switch (t->kind) {
  case TKind::Out: return t_out(payload(t->items), encode_type(t->next));
  case TKind::In: return t_in(payload(t->items), encode_type(t->next));
  case TKind::Sel:
  case TKind::Bra: {
    Labels ls;
    for (auto& [l, s] : t->labels) ls.emplace_back(l, encode_type(s));
    return t->kind == TKind::Sel ? t_sel(ls) : t_bra(ls);
  }
  case TKind::Rec: return t_rec(t->var, encode_type(t->next));
  case TKind::Chan: {
    TypeP u = t->items[0];
    return t_chan(is_arrow(u) ? encode_type(u) : t_lin({t_in({t_lin({encode_type(u)})}, t_end())}));
  }
  case TKind::Lin:
  case TKind::Sh: {
    TypeList ps;
    for (auto& c : t->items) ps.push_back(encode_type(c));
    return t->kind == TKind::Lin ? t_lin(ps) : t_sh(ps);
  }
  default:
    return t;
  }
}

namespace {

struct Encoder {
  NameTypes env; // name-passing types, current
  std::set<std::string> first_order; // input binders standing for names

  std::optional<TypeP> lookup(const Name& n) const {
    auto it = env.find(n);
    if (it == env.end()) return std::nullopt;
    return it->second;
  }
  void advance(const Name& n, const TypeP& t) {
    if (env.count(n) && !n.shared) env[n] = t;
  }

  ValP val(const ValP& v) {
    if (auto a = as<AbsV>(v)) {
      NameTypes saved = env;
      std::vector<Binder> ps;
      for (auto& b : a->params) {
        if (b.type) env[b.name] = b.type;
        ps.push_back(Binder{b.name, encode_type(b.type)});
      }
      ProcP body = proc(a->body);
      env = saved;
      return mk::abs(ps, a->lin, body);
    }
    return v;
  }

  ProcP proc(const ProcP& p) {
    return std::visit(
        [&](auto&& x) -> ProcP {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Output>) {
            auto st = lookup(x.subj);
            TypeP cur = st ? unfold_head(*st) : nullptr;
            std::vector<ValP> pay;
            for (std::size_t i = 0; i < x.payload.size(); ++i) {
              const ValP& v = x.payload[i];
              auto xv0 = as<VarV>(v);
              bool fo_var = xv0 && first_order.count(xv0->id);
              bool fo = as<NameV>(v) || as<Lit>(v) || fo_var;
              if (!fo) {
                pay.push_back(val(v));
                continue;
              }
              TypeP c = cur && cur->kind == TKind::Out && i < cur->items.size() ? cur->items[i] : nullptr;
              Name z{"z" + fresh_suffix(), 0, false, false};
              std::string xv = "x" + fresh_suffix();
              Arg carried = fo_var ? Arg(Name{xv0->id, 0, false, false})
                                   : as<NameV>(v) ? Arg(as<NameV>(v)->name)
                                                  : Arg(*as<Lit>(v));
              TypeP zt = c ? t_in({t_lin({encode_type(c)})}, t_end()) : nullptr;
              pay.push_back(mk::abs({Binder{z, zt}}, Lin::lin, mk::in(z, {xv}, mk::app(mk::var(xv), {carried}))));
            }
            if (cur && cur->kind == TKind::Out) advance(x.subj, cur->next);
            return mk::out(x.subj, std::move(pay), proc(x.cont));
          } else if constexpr (std::is_same_v<T, Input>) {
            auto st = lookup(x.subj);
            TypeP cur = st ? unfold_head(*st) : nullptr;
            bool higher = cur && cur->kind == TKind::In && !cur->items.empty() && is_arrow(cur->items[0]);
            if (higher || x.binders.size() != 1) {
              if (cur && cur->kind == TKind::In) advance(x.subj, cur->next);
              return mk::in(x.subj, x.binders, proc(x.cont));
            }
            TypeP c = cur && cur->kind == TKind::In ? cur->items[0] : nullptr;
            if (cur && cur->kind == TKind::In) advance(x.subj, cur->next);
            Name bx{x.binders[0], 0, false, c && c->kind == TKind::Chan};
            if (c && is_session(c)) env[bx] = c;
            first_order.insert(x.binders[0]);
            ProcP q = proc(x.cont);
            std::string y = "y" + fresh_suffix();
            Name s{"s" + fresh_suffix(), 0, false, false};
            TypeP lam = c ? t_lin({encode_type(c)}) : nullptr;
            TypeP st_s = c ? t_in({lam}, t_end()) : nullptr;
            ValP body = mk::abs({Binder{bx, c ? encode_type(c) : nullptr}}, Lin::lin, q);
            return mk::in(x.subj, {y},
                          mk::res(s, st_s, mk::par(mk::app(mk::var(y), {s}), mk::out(s.co(), {body}, mk::nil()))));
          } else if constexpr (std::is_same_v<T, Select>) {
            auto st = lookup(x.subj);
            if (st) {
              TypeP cur = unfold_head(*st);
              for (auto& [l, s] : cur->labels)
                if (l == x.label) advance(x.subj, s);
            }
            return mk::sel(x.subj, x.label, proc(x.cont));
          } else if constexpr (std::is_same_v<T, Branch>) {
            auto st = lookup(x.subj);
            std::vector<std::pair<std::string, ProcP>> cs;
            NameTypes saved = env;
            for (auto& [l, q] : x.cases) {
              env = saved;
              if (st) {
                TypeP cur = unfold_head(*st);
                for (auto& [m, s] : cur->labels)
                  if (m == l) advance(x.subj, s);
              }
              cs.emplace_back(l, proc(q));
            }
            return mk::bra(x.subj, std::move(cs));
          } else if constexpr (std::is_same_v<T, App>) {
            return mk::app(val(x.fun), x.args);
          } else if constexpr (std::is_same_v<T, Par>) {
            ProcP l = proc(x.left);
            return mk::par(l, proc(x.right));
          } else if constexpr (std::is_same_v<T, Res>) {
            if (x.type) {
              env[x.name] = x.type;
              if (!x.name.shared) env[x.name.co()] = dual(x.type);
            }
            return mk::res(x.name, encode_type(x.type), proc(x.body));
          } else {
            return p;
          }
        },
        p->v);
  }
};

} // namespace

ProcP encode_namepass(const ProcP& p, const NameTypes& env) {
  Encoder e;
  e.env = env;
  return e.proc(p);
}

} // namespace hodecomp
