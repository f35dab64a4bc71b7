#include "hodecomp/optimize.hpp"

#include <algorithm>
#include <climits>
#include <functional>
#include <map>
#include <set>

#include "hodecomp/syntax.hpp"

namespace hodecomp {

TypeP thunk_param_type() { return t_chan(t_sh({t_end()})); }

TypeP thunk_type() { return t_lin({thunk_param_type()}); }

ValP thunk(const ProcP& body) {
  return mk::abs({Binder{Name{"t" + fresh_suffix()}, thunk_param_type()}}, Lin::lin, body);
}

bool is_thunk(const ValP& v) {
  auto a = as<AbsV>(v);
  if (!a || a->lin != Lin::lin || a->params.size() != 1) return false;
  const Binder& b = a->params[0];
  if (!b.type || !type_equal(b.type, thunk_param_type())) return false;
  for (auto& n : free_names(a->body))
    if (n.base == b.name.base && n.index == b.name.index) return false;
  return true;
}

ProcP activator(const Name& c) {
  Name t{"t" + fresh_suffix()};
  return mk::in(c, {"b"}, mk::res(t, thunk_param_type(), mk::app(mk::var("b"), {Arg(t)})));
}

namespace {

template <class F> void each_value(const ProcP& p, F&& f) {
  if (auto x = as<Output>(p))
    for (auto& v : x->payload) f(v);
  if (auto x = as<App>(p)) f(x->fun);
}

} // namespace

int prefix_depth(const ProcP& p, bool skip_thunks) {
  return std::visit(
      [&](auto&& x) -> int {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Output> || std::is_same_v<T, Input> || std::is_same_v<T, Select>) {
          return 1 + prefix_depth(x.cont, skip_thunks);
        } else if constexpr (std::is_same_v<T, Branch>) {
          int m = 0;
          for (auto& c : x.cases) m = std::max(m, prefix_depth(c.second, skip_thunks));
          return 1 + m;
        } else if constexpr (std::is_same_v<T, Par>) {
          return std::max(prefix_depth(x.left, skip_thunks), prefix_depth(x.right, skip_thunks));
        } else if constexpr (std::is_same_v<T, Res>) {
          return prefix_depth(x.body, skip_thunks);
        } else {
          return 0;
        }
      },
      p->v);
}

namespace {

int max_depth_val(const ValP& v, bool skip);

int max_depth_sub(const ProcP& p, bool skip) {
  int m = 0;
  each_value(p, [&](const ValP& v) { m = std::max(m, max_depth_val(v, skip)); });
  std::visit(
      [&](auto&& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Output> || std::is_same_v<T, Input> || std::is_same_v<T, Select>) {
          m = std::max(m, max_depth_sub(x.cont, skip));
        } else if constexpr (std::is_same_v<T, Branch>) {
          for (auto& c : x.cases) m = std::max(m, max_depth_sub(c.second, skip));
        } else if constexpr (std::is_same_v<T, Par>) {
          m = std::max({m, max_depth_sub(x.left, skip), max_depth_sub(x.right, skip)});
        } else if constexpr (std::is_same_v<T, Res>) {
          m = std::max(m, max_depth_sub(x.body, skip));
        }
      },
      p->v);
  return m;
}

int max_depth_val(const ValP& v, bool skip) {
  auto a = as<AbsV>(v);
  if (!a || (skip && is_thunk(v))) return 0;
  return std::max(prefix_depth(a->body, skip), max_depth_sub(a->body, skip));
}

} // namespace

int max_prefix_depth(const ProcP& p, bool skip_thunks) {
  return std::max(prefix_depth(p, skip_thunks), max_depth_sub(p, skip_thunks));
}

namespace {

using NameFn = std::function<Name(const Name&)>;

ProcP rename_proc(const ProcP& p, const NameFn& f);

ValP rename_val(const ValP& v, const NameFn& f) {
  if (auto a = as<AbsV>(v)) {
    std::vector<Binder> ps;
    for (auto& b : a->params) ps.push_back(Binder{f(b.name), b.type});
    return mk::abs(ps, a->lin, rename_proc(a->body, f));
  }
  if (auto n = as<NameV>(v)) return mk::name(f(n->name));
  return v;
}

ProcP rename_proc(const ProcP& p, const NameFn& f) {
  return std::visit(
      [&](auto&& x) -> ProcP {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Output>) {
          std::vector<ValP> pay;
          for (auto& v : x.payload) pay.push_back(rename_val(v, f));
          return mk::out(f(x.subj), pay, rename_proc(x.cont, f));
        } else if constexpr (std::is_same_v<T, Input>) {
          return mk::in(f(x.subj), x.binders, rename_proc(x.cont, f));
        } else if constexpr (std::is_same_v<T, Select>) {
          return mk::sel(f(x.subj), x.label, rename_proc(x.cont, f));
        } else if constexpr (std::is_same_v<T, Branch>) {
          std::vector<std::pair<std::string, ProcP>> cs;
          for (auto& c : x.cases) cs.emplace_back(c.first, rename_proc(c.second, f));
          return mk::bra(f(x.subj), cs);
        } else if constexpr (std::is_same_v<T, App>) {
          std::vector<Arg> as;
          for (auto& a : x.args) {
            if (auto n = std::get_if<Name>(&a)) as.emplace_back(f(*n));
            else as.push_back(a);
          }
          return mk::app(rename_val(x.fun, f), as);
        } else if constexpr (std::is_same_v<T, Par>) {
          return mk::par(rename_proc(x.left, f), rename_proc(x.right, f));
        } else if constexpr (std::is_same_v<T, Res>) {
          return mk::res(f(x.name), x.type, rename_proc(x.body, f));
        } else {
          return p;
        }
      },
      p->v);
}

const std::string kPlaceholder = "#new";

class Duos {
public:
  int next = 0;
  int seq = 0;
  std::map<int, std::pair<int, int>> keys; // placeholder -> (after index, order)

  ValP val(const ValP& v) {
    if (auto a = as<AbsV>(v)) return mk::abs(a->params, a->lin, proc(a->body));
    return v;
  }

  // Index of the first propagator output along the prefix chain.
  static int first_send(const ProcP& p) {
    if (auto o = as<Output>(p)) {
      if (o->subj.propagator() && o->subj.dual) return o->subj.index;
      return first_send(o->cont);
    }
    if (auto i = as<Input>(p)) return first_send(i->cont);
    if (auto s = as<Select>(p)) return first_send(s->cont);
    if (auto b = as<Branch>(p)) {
      for (auto& c : b->cases)
        if (int j = first_send(c.second); j) return j;
      return 0;
    }
    if (auto r = as<Res>(p)) return first_send(r->body);
    if (auto q = as<Par>(p)) {
      if (int j = first_send(q->left); j) return j;
      return first_send(q->right);
    }
    return 0;
  }

  // π.C with C of depth two: π.c̄_d!<{C}>.0 | c_d?(b).(b t)
  ProcP split(const ProcP& p, int after) {
    Name d{kPlaceholder, ++next};
    keys[next] = {after, ++seq};
    auto send = [&](const ProcP& c) { return mk::out(d.co(), {thunk(c)}, mk::nil()); };
    ProcP head;
    if (auto x = as<Output>(p)) {
      std::vector<ValP> pay;
      for (auto& v : x->payload) pay.push_back(val(v));
      head = mk::out(x->subj, pay, send(proc(x->cont)));
    } else if (auto x = as<Input>(p)) {
      head = mk::in(x->subj, x->binders, send(proc(x->cont)));
    } else if (auto x = as<Select>(p)) {
      head = mk::sel(x->subj, x->label, send(proc(x->cont)));
    } else {
      auto b = as<Branch>(p);
      std::vector<std::pair<std::string, ProcP>> cs;
      for (auto& c : b->cases) cs.emplace_back(c.first, send(proc(c.second)));
      head = mk::bra(b->subj, cs);
    }
    return mk::res(d, t_in({thunk_type()}, t_end()), mk::par(head, activator(d)));
  }

  ProcP proc(const ProcP& p) {
    const int depth = prefix_depth(p, false);
    if (depth >= 4) throw OptimizeError("sequence of " + std::to_string(depth) + " prefixes: " + print(p, {false}));
    if (depth == 3 && (as<Output>(p) || as<Input>(p) || as<Select>(p) || as<Branch>(p))) {
      int after = INT_MAX / 2;
      if (auto i = as<Input>(p); i && i->subj.propagator() && !i->subj.dual) {
        after = i->subj.index;
      } else if (int j = first_send(p); j) {
        after = j - 1;
      }
      if (auto b = as<Branch>(p)) {
        // Only the cases that are still sequences of two prefixes move.
        std::vector<std::pair<std::string, ProcP>> cs;
        for (auto& c : b->cases) {
          if (prefix_depth(c.second, false) == 2) {
            Name d{kPlaceholder, ++next};
            keys[next] = {after, ++seq};
            ProcP send = mk::out(d.co(), {thunk(proc(c.second))}, mk::nil());
            cs.emplace_back(c.first, mk::res(d, t_in({thunk_type()}, t_end()), mk::par(send, activator(d))));
          } else {
            cs.emplace_back(c.first, proc(c.second));
          }
        }
        return mk::bra(b->subj, cs);
      }
      return split(p, after);
    }
    return std::visit(
        [&](auto&& x) -> ProcP {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Output>) {
            std::vector<ValP> pay;
            for (auto& v : x.payload) pay.push_back(val(v));
            return mk::out(x.subj, pay, proc(x.cont));
          } else if constexpr (std::is_same_v<T, Input>) {
            return mk::in(x.subj, x.binders, proc(x.cont));
          } else if constexpr (std::is_same_v<T, Select>) {
            return mk::sel(x.subj, x.label, proc(x.cont));
          } else if constexpr (std::is_same_v<T, Branch>) {
            std::vector<std::pair<std::string, ProcP>> cs;
            for (auto& c : x.cases) cs.emplace_back(c.first, proc(c.second));
            return mk::bra(x.subj, cs);
          } else if constexpr (std::is_same_v<T, App>) {
            return mk::app(val(x.fun), x.args);
          } else if constexpr (std::is_same_v<T, Par>) {
            return mk::par(proc(x.left), proc(x.right));
          } else if constexpr (std::is_same_v<T, Res>) {
            return mk::res(x.name, x.type, proc(x.body));
          } else {
            return p;
          }
        },
        p->v);
  }

  ProcP renumber(const ProcP& p) const {
    std::set<int> old;
    rename_proc(p, [&](const Name& n) {
      if (n.propagator()) old.insert(n.index);
      return n;
    });
    std::vector<std::pair<std::pair<int, int>, std::pair<bool, int>>> order; // key -> (placeholder?, id)
    for (int i : old) order.push_back({{i, 0}, {false, i}});
    for (auto& [id, key] : keys) order.push_back({key, {true, id}});
    std::sort(order.begin(), order.end());
    const int base = old.empty() ? 1 : *old.begin();
    std::map<int, int> of_old, of_new;
    for (std::size_t j = 0; j < order.size(); ++j) {
      int to = base + static_cast<int>(j);
      (order[j].second.first ? of_new : of_old)[order[j].second.second] = to;
    }
    return rename_proc(p, [&](const Name& n) {
      if (n.propagator()) return prop(of_old.at(n.index), n.dual);
      if (n.base == kPlaceholder) return prop(of_new.at(n.index), n.dual);
      return n;
    });
  }
};

void collect_non_monadic(const ProcP& p, std::vector<std::pair<std::size_t, Name>>& out);

void collect_non_monadic_val(const ValP& v, std::vector<std::pair<std::size_t, Name>>& out) {
  if (auto a = as<AbsV>(v)) collect_non_monadic(a->body, out);
}

void collect_non_monadic(const ProcP& p, std::vector<std::pair<std::size_t, Name>>& out) {
  std::visit(
      [&](auto&& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Output>) {
          if (x.payload.size() != 1) out.emplace_back(x.payload.size(), x.subj);
          for (auto& v : x.payload) collect_non_monadic_val(v, out);
          collect_non_monadic(x.cont, out);
        } else if constexpr (std::is_same_v<T, Input>) {
          if (x.binders.size() != 1) out.emplace_back(x.binders.size(), x.subj);
          collect_non_monadic(x.cont, out);
        } else if constexpr (std::is_same_v<T, Select>) {
          collect_non_monadic(x.cont, out);
        } else if constexpr (std::is_same_v<T, Branch>) {
          for (auto& c : x.cases) collect_non_monadic(c.second, out);
        } else if constexpr (std::is_same_v<T, App>) {
          collect_non_monadic_val(x.fun, out);
        } else if constexpr (std::is_same_v<T, Par>) {
          collect_non_monadic(x.left, out);
          collect_non_monadic(x.right, out);
        } else if constexpr (std::is_same_v<T, Res>) {
          collect_non_monadic(x.body, out);
        }
      },
      p->v);
}

// Monadic breakdown.

using Requests = std::vector<std::pair<std::string, Name>>; // variable, use site

struct MState {
  BreakdownState b;
  std::set<std::string> fwd; // variables delivered through forwarders
};

struct Part {
  ProcP p;
  Requests req;
};

TypeList pointwise_dual(const TypeList& ts) {
  TypeList out;
  for (auto& t : ts) out.push_back(dual(t));
  return out;
}

std::vector<Arg> as_args(const std::vector<Name>& ns) { return {ns.begin(), ns.end()}; }

class Monadic {
public:
  std::vector<std::map<int, TypeList>> scopes{1};
  int fresh = 0;

  Name fresh_name(const std::string& hint) { return Name{hint + "%" + std::to_string(++fresh)}; }

  const NameInfo& lookup(const MState& st, const Name& n) const {
    auto it = st.b.names.find(n);
    if (it == st.b.names.end()) throw DecomposeError("no type for name " + print_name(n));
    return it->second;
  }

  TypeP var_type(const MState& st, const std::string& x) const {
    auto it = st.b.vars.find(x);
    if (it == st.b.vars.end()) throw DecomposeError("no type for variable " + x);
    return gdecomp_value(it->second);
  }

  ValP mk_thunk(const ProcP& body) {
    return mk::abs({Binder{fresh_name("t"), thunk_param_type()}}, Lin::lin, body);
  }

  // c_j?(b).(extra | new t in (b t))
  ProcP act(int j, std::vector<ProcP> extra = {}) {
    Name t = fresh_name("t");
    extra.push_back(mk::res(t, thunk_param_type(), mk::app(mk::var("b"), {Arg(t)})));
    return mk::in(prop(j), {"b"}, mk::par(extra));
  }

  ProcP emit(int k, const ProcP& body) { return mk::out(prop(k, true), {mk_thunk(body)}, mk::nil()); }

  static ProcP restore(const Name& cr, const std::vector<Name>& zs) {
    return mk::in(cr, {"r"}, mk::app(mk::var("r"), as_args(zs)));
  }

  // Forwarded variables among xs are received before body, one use site each.
  ProcP recv(const MState& st, const std::vector<std::string>& xs, ProcP body, Requests& req) {
    std::vector<std::string> need;
    for (auto& x : xs)
      if (st.fwd.count(x)) need.push_back(x);
    for (auto it = need.rbegin(); it != need.rend(); ++it) {
      Name site{"#fwd:" + *it, ++fresh};
      body = mk::in(site, {*it}, body);
      req.emplace_back(*it, site);
    }
    return body;
  }

  ProcP restrict_props(int from, int count, ProcP body) {
    std::vector<std::pair<Name, TypeP>> rs;
    for (int j = from; j < from + count; ++j) {
      auto it = scopes.back().find(j);
      if (it == scopes.back().end()) throw DecomposeError("propagator " + std::to_string(j) + " never used");
      rs.emplace_back(prop(j), t_in(it->second, t_end()));
    }
    return mk::res(rs, std::move(body));
  }

  std::vector<Binder> rec_binders(const NameInfo& i) {
    Name z = fresh_name("z");
    std::vector<Binder> out;
    TypeList ts = rsdecomp(i.type);
    for (std::size_t j = 0; j < ts.size(); ++j) out.push_back(Binder{z.with_index(static_cast<int>(j) + 1), ts[j]});
    return out;
  }

  static std::vector<Name> binder_names(const std::vector<Binder>& bs) {
    std::vector<Name> out;
    for (auto& b : bs) out.push_back(b.name);
    return out;
  }

  ValP value(const MState& st, const ValP& v, int k) {
    if (as<VarV>(v) || as<Lit>(v)) return v;
    if (as<NameV>(v)) throw DecomposeError("name payload in a higher-order term");
    const AbsV& a = std::get<AbsV>(v->v);
    MState s = st;
    s.fwd.clear();
    s.b.k = k;
    std::vector<Binder> params;
    std::vector<std::pair<Name, TypeP>> server_res;
    std::vector<ProcP> parts;
    for (auto& b : a.params) {
      if (!b.type) throw DecomposeError("abstraction binder " + print_name(b.name) + " lacks a type");
      BinderExpansion e = expand_binder(b.name, b.type);
      params.insert(params.end(), e.params.begin(), e.params.end());
      server_res.insert(server_res.end(), e.server_res.begin(), e.server_res.end());
      parts.insert(parts.end(), e.servers.begin(), e.servers.end());
      s.b.names[b.name] = e.info;
    }
    bool shared = a.lin == Lin::sh;
    if (shared) scopes.emplace_back();
    parts.push_back(act(k));
    Part body = proc(s, a.body);
    if (!body.req.empty()) throw DecomposeError("unresolved forwarder for " + body.req.front().first);
    parts.push_back(body.p);
    ProcP out = mk::res(server_res, mk::par(parts));
    if (shared) {
      out = restrict_props(k, degree(a.body), out);
      scopes.pop_back();
    }
    return mk::abs(params, a.lin, out);
  }

  Part proc(const MState& st, const ProcP& p) {
    const int k = st.b.k;
    scopes.back()[k] = {thunk_type()};
    return std::visit(
        [&](auto&& x) -> Part {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Output>) {
            const NameInfo inf = lookup(st, x.subj);
            MState after = st;
            if (is_session(inf.type)) {
              TypeP t = unfold_head(inf.type);
              if (t->kind != TKind::Out) throw DecomposeError("output on " + print_name(x.subj) + " at type " + show(inf.type));
              after.b = advance_name(st.b, x.subj, t->next);
            }
            if (x.payload.size() != 1) throw DecomposeError("output of " + std::to_string(x.payload.size()) + " values on " + print_name(x.subj));
            const ValP& v = x.payload[0];
            const int kn = k + 1 + degree_val(v);
            ValP v2 = value(after, v, k + 1);
            Requests req;
            ProcP action;
            if (inf.rec) {
              auto zs = rec_binders(inf);
              auto zn = binder_names(zs);
              Name cr = rec_prop(inf.target);
              ProcP body = mk::out(zn[findex(inf.type) - 1], {v2}, act(kn, {restore(cr, zn)}));
              action = mk::out(cr, {mk::abs(zs, Lin::lin, body)}, mk::nil());
            } else {
              action = mk::out(inf.target, {v2}, act(kn));
            }
            ProcP th = emit(k, recv(st, free_vars(v), action, req));
            MState qs = after;
            qs.b.k = kn;
            Part q = proc(qs, x.cont);
            req.insert(req.end(), q.req.begin(), q.req.end());
            return {mk::par(th, q.p), req};
          } else if constexpr (std::is_same_v<T, Input>) {
            const NameInfo inf = lookup(st, x.subj);
            MState after = st;
            TypeList payload_types;
            if (is_session(inf.type)) {
              TypeP t = unfold_head(inf.type);
              if (t->kind != TKind::In) throw DecomposeError("input on " + print_name(x.subj) + " at type " + show(inf.type));
              after.b = advance_name(st.b, x.subj, t->next);
              payload_types = t->items;
            } else if (inf.type->kind == TKind::Chan) {
              payload_types = inf.type->items;
            } else {
              throw DecomposeError("input on " + print_name(x.subj) + " at type " + show(inf.type));
            }
            if (x.binders.size() != 1 || payload_types.size() != 1)
              throw DecomposeError("input of " + std::to_string(x.binders.size()) + " values on " + print_name(x.subj));
            const std::string& y = x.binders[0];
            after.b.vars[y] = payload_types[0];
            after.fwd.insert(y);
            after.b.k = k + 1;
            Part q = proc(after, x.cont);
            Requests others;
            std::vector<ProcP> fwds;
            std::vector<std::pair<Name, TypeP>> sites;
            for (auto& [var, site] : q.req) {
              if (var != y) {
                others.emplace_back(var, site);
                continue;
              }
              fwds.push_back(mk::out(site.co(), {mk::var(y)}, mk::nil()));
              sites.emplace_back(site, t_in({var_type(after, y)}, t_end()));
            }
            ProcP action;
            if (inf.rec) {
              auto zs = rec_binders(inf);
              auto zn = binder_names(zs);
              Name cr = rec_prop(inf.target);
              fwds.push_back(restore(cr, zn));
              ProcP body = mk::in(zn[findex(inf.type) - 1], {y}, act(k + 1, fwds));
              action = mk::out(cr, {mk::abs(zs, Lin::lin, body)}, mk::nil());
            } else {
              action = mk::in(inf.target, {y}, act(k + 1, fwds));
            }
            return {mk::res(sites, mk::par(emit(k, action), q.p)), others};
          } else if constexpr (std::is_same_v<T, App>) {
            Requests req;
            ValP head = value(st, x.fun, k + 1);
            std::vector<Arg> args;
            std::vector<std::pair<Name, std::vector<Binder>>> nest;
            for (auto& a : x.args) {
              if (std::holds_alternative<Lit>(a)) {
                args.push_back(a);
                continue;
              }
              const NameInfo& inf = lookup(st, std::get<Name>(a));
              if (inf.rec) {
                auto zs = rec_binders(inf);
                for (auto& b : zs) args.emplace_back(b.name);
                nest.emplace_back(rec_prop(inf.target), zs);
              } else {
                for (auto& n : expand_target(inf)) args.emplace_back(n);
              }
            }
            ProcP body = mk::app(head, args);
            for (auto it = nest.rbegin(); it != nest.rend(); ++it)
              body = mk::out(it->first, {mk::abs(it->second, Lin::lin, body)}, mk::nil());
            return {emit(k, recv(st, free_vars(x.fun), body, req)), req};
          } else if constexpr (std::is_same_v<T, Res>) {
            if (!x.type) throw DecomposeError("restriction of " + print_name(x.name) + " lacks a type");
            Name s = x.name.plain();
            Name sb = s.co();
            MState body = st;
            if (x.type->kind == TKind::Chan) {
              body.b.names[s] = NameInfo{s.with_index(1), x.type, false};
              Part q = proc(body, x.body);
              return {mk::res(s.with_index(1), gdecomp(x.type)[0], q.p), q.req};
            }
            if (!is_session(x.type)) throw DecomposeError("restriction at non-channel type " + show(x.type));
            if (is_tail_recursive(x.type)) {
              TypeList r = gdecomp(x.type);
              std::vector<std::pair<Name, TypeP>> rs;
              std::vector<Name> ns, nbs;
              for (std::size_t j = 0; j < r.size(); ++j) {
                ns.push_back(s.with_index(static_cast<int>(j) + 1));
                nbs.push_back(sb.with_index(static_cast<int>(j) + 1));
                rs.emplace_back(ns.back(), r[j]);
              }
              body.b.names[s] = NameInfo{ns[0], x.type, true};
              body.b.names[sb] = NameInfo{nbs[0], dual(x.type), true};
              Name cs = rec_prop(ns[0]);
              Name cb = rec_prop(nbs[0]);
              Part q = proc(body, x.body);
              ProcP inner = mk::par({rec_server(cs, ns), rec_server(cb, nbs), q.p});
              inner = mk::res(cb, t_chan(t_lin(pointwise_dual(r))), inner);
              inner = mk::res(cs, t_chan(t_lin(r)), inner);
              return {mk::res(rs, inner), q.req};
            }
            TypeList g = gdecomp(x.type);
            std::vector<std::pair<Name, TypeP>> rs;
            for (std::size_t j = 0; j < g.size(); ++j) rs.emplace_back(s.with_index(static_cast<int>(j) + 1), g[j]);
            body.b.names[s] = NameInfo{s.with_index(1), x.type, false};
            body.b.names[sb] = NameInfo{sb.with_index(1), dual(x.type), false};
            Part q = proc(body, x.body);
            return {mk::res(rs, q.p), q.req};
          } else if constexpr (std::is_same_v<T, Par>) {
            const int l = degree(x.left);
            ProcP th = emit(k, mk::par(act(k + 1), act(k + l + 1)));
            MState qs = st, rs = st;
            qs.b.k = k + 1;
            rs.b.k = k + l + 1;
            Part q = proc(qs, x.left);
            Part r = proc(rs, x.right);
            Requests req = q.req;
            req.insert(req.end(), r.req.begin(), r.req.end());
            return {mk::par({th, q.p, r.p}), req};
          } else if constexpr (std::is_same_v<T, Inact>) {
            return {emit(k, mk::nil()), {}};
          } else if constexpr (std::is_same_v<T, Branch>) {
            const NameInfo inf = lookup(st, x.subj);
            if (inf.rec) throw DecomposeError("branching on a recursive session " + print_name(x.subj));
            TypeP t = unfold_head(inf.type);
            if (t->kind != TKind::Bra) throw DecomposeError("branching on " + print_name(x.subj) + " at type " + show(inf.type));
            std::vector<std::pair<std::string, ProcP>> cases;
            for (auto& [l, pj] : x.cases) {
              auto lt = std::find_if(t->labels.begin(), t->labels.end(), [&](auto& m) { return m.first == l; });
              if (lt == t->labels.end()) throw DecomposeError("label " + l + " not in " + show(inf.type));
              BinderExpansion e = expand_binder(fresh_name("y"), lt->second);
              MState sj = st;
              sj.fwd.clear();
              sj.b.names[x.subj] = e.info;
              sj.b.k = k + 1;
              scopes.emplace_back();
              std::vector<ProcP> parts = e.servers;
              parts.push_back(act(k + 1));
              Part q = proc(sj, pj);
              if (!q.req.empty()) throw DecomposeError("unresolved forwarder for " + q.req.front().first);
              parts.push_back(q.p);
              ProcP body = restrict_props(k + 1, degree(pj), mk::res(e.server_res, mk::par(parts)));
              scopes.pop_back();
              cases.emplace_back(l, mk::out(inf.target, {mk::abs(e.params, Lin::lin, body)}, mk::nil()));
            }
            Requests req;
            ProcP th = emit(k, recv(st, free_vars(p), mk::bra(inf.target, cases), req));
            return {th, req};
          } else if constexpr (std::is_same_v<T, Select>) {
            const NameInfo inf = lookup(st, x.subj);
            if (inf.rec) throw DecomposeError("selection on a recursive session " + print_name(x.subj));
            TypeP t = unfold_head(inf.type);
            if (t->kind != TKind::Sel) throw DecomposeError("selection on " + print_name(x.subj) + " at type " + show(inf.type));
            auto lt = std::find_if(t->labels.begin(), t->labels.end(), [&](auto& m) { return m.first == x.label; });
            if (lt == t->labels.end()) throw DecomposeError("label " + x.label + " not in " + show(inf.type));
            const TypeP sj = lt->second;
            const bool rec = is_recursive_session(sj);
            TypeList gs = rec ? rsdecomp(sj) : gdecomp(sj);
            TypeList ds = pointwise_dual(gs);
            std::vector<Name> mine, other;
            std::vector<std::pair<Name, TypeP>> rs;
            for (std::size_t j = 0; j < gs.size(); ++j) {
              Name n = inf.target.with_index(inf.target.index + static_cast<int>(j) + 1);
              mine.push_back(n);
              other.push_back(n.co());
              rs.emplace_back(n.plain(), n.dual ? ds[j] : gs[j]);
            }
            Name yb = fresh_name("y");
            std::vector<Binder> ys;
            for (std::size_t j = 0; j < ds.size(); ++j) ys.push_back(Binder{yb.with_index(static_cast<int>(j) + 1), ds[j]});
            std::string z = "z%" + std::to_string(++fresh);
            std::vector<Arg> yargs;
            for (auto& b : ys) yargs.emplace_back(b.name);
            ProcP mbody = mk::sel(inf.target, x.label, mk::in(inf.target, {z}, act(k + 2, {mk::app(mk::var(z), yargs)})));
            ValP m = mk::abs(ys, Lin::lin, mbody);
            MState cs = st;
            cs.b.names[x.subj] = NameInfo{mine[0], sj, rec};
            cs.b.k = k + 2;
            std::vector<ProcP> parts;
            parts.push_back(mk::in(prop(k + 1), {"y"}, mk::app(mk::var("y"), as_args(other))));
            std::vector<std::pair<Name, TypeP>> srv;
            if (rec) {
              Name cr = rec_prop(mine[0]);
              parts.push_back(rec_server(cr, mine));
              srv.emplace_back(cr, t_chan(t_lin(gs)));
            }
            Part q = proc(cs, x.cont);
            scopes.back()[k + 1] = {t_lin(ds)};
            parts.push_back(q.p);
            ProcP th = emit(k, mk::out(prop(k + 1, true), {m}, mk::nil()));
            return {mk::par(th, mk::res(rs, mk::res(srv, mk::par(parts)))), q.req};
          }
        },
        p->v);
  }
};

} // namespace

ProcP to_duos(const ProcP& p) {
  Duos d;
  ProcP out = d.proc(p);
  return d.renumber(out);
}

std::vector<std::pair<std::size_t, Name>> non_monadic_prefixes(const ProcP& p) {
  std::vector<std::pair<std::size_t, Name>> out;
  collect_non_monadic(p, out);
  return out;
}

ProcP monadic_breakdown(const BreakdownState& st, const ProcP& p) {
  Monadic m;
  Part r = m.proc(MState{st, {}}, p);
  if (!r.req.empty()) throw DecomposeError("unresolved forwarder for " + r.req.front().first);
  return r.p;
}

Decomposition monadic_decompose(const ProcP& p, const NameTypes& free, int k) {
  if (!free_vars(p).empty()) throw DecomposeError("open process: free variable " + free_vars(p).front());
  for (auto& n : free_names(p))
    if (!free.count(n)) throw DecomposeError("no type for free name " + print_name(n));
  CheckResult cr = check_process(source_envs(free), p);
  if (!cr.ok) throw DecomposeError("source does not typecheck: " + to_string(cr.diagnostics.front()));

  Monadic m;
  MState st{initial_state(free, k), {}};
  Part body = m.proc(st, p);
  if (!body.req.empty()) throw DecomposeError("unresolved forwarder for " + body.req.front().first);

  Decomposition d;
  std::vector<ProcP> parts;
  std::vector<std::pair<Name, TypeP>> rec_res;
  for (auto& [n, t] : free) {
    d.sigma.names[n] = n.with_index(1);
    if (!is_recursive_session(t)) continue;
    TypeList r = rsdecomp(t);
    std::vector<Name> ns;
    for (std::size_t j = 0; j < r.size(); ++j) ns.push_back(n.with_index(static_cast<int>(j) + 1));
    Name c = rec_prop(ns[0]);
    d.recpropagators.push_back(c);
    rec_res.emplace_back(c, t_chan(t_lin(r)));
    parts.push_back(rec_server(c, ns));
  }
  parts.push_back(m.act(k));
  parts.push_back(body.p);
  const int n = degree(p);
  for (int j = k; j < k + n; ++j) d.propagators.push_back(prop(j));
  d.term = m.restrict_props(k, n, mk::res(rec_res, mk::par(parts)));
  d.envs = decomposed_envs(free);
  return d;
}

} // namespace hodecomp
