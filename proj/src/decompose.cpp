#include "hodecomp/decompose.hpp"

#include <algorithm>
#include <climits>

#include "hodecomp/syntax.hpp"

namespace hodecomp {

int degree_val(const ValP& v) {
  if (auto a = as<AbsV>(v)) return a->lin == Lin::lin ? degree(a->body) : 0;
  if (as<NameV>(v)) throw DecomposeError("name payload in a higher-order term");
  return 0;
}

int degree(const ProcP& p) {
  return std::visit(
      [](auto&& x) -> int {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Output>) {
          int l = 0;
          for (auto& v : x.payload) l += degree_val(v);
          return l + degree(x.cont) + 1;
        } else if constexpr (std::is_same_v<T, Input>) {
          return degree(x.cont) + 1;
        } else if constexpr (std::is_same_v<T, Select>) {
          return degree(x.cont) + 2;
        } else if constexpr (std::is_same_v<T, Branch>) {
          return 1;
        } else if constexpr (std::is_same_v<T, App>) {
          return degree_val(x.fun) + 1;
        } else if constexpr (std::is_same_v<T, Par>) {
          return degree(x.left) + degree(x.right) + 1;
        } else if constexpr (std::is_same_v<T, Res>) {
          return degree(x.body);
        } else {
          return 1;
        }
      },
      p->v);
}

bool is_recursive_session(const TypeP& t) { return is_session(t) && is_rec_unfolding(t); }

ProcP rec_server(const Name& cr, const std::vector<Name>& ns) {
  std::vector<Arg> args(ns.begin(), ns.end());
  return mk::in(cr, {"b"}, mk::app(mk::var("b"), args));
}

std::vector<Name> expand_target(const NameInfo& i) {
  std::vector<Name> out;
  std::size_t n = is_session(i.type) ? decomp_len(i.type) : 1;
  for (std::size_t j = 0; j < n; ++j) out.push_back(i.target.with_index(i.target.index + static_cast<int>(j)));
  return out;
}

BreakdownState advance_name(const BreakdownState& st, const Name& key, const TypeP& next) {
  BreakdownState s = st;
  NameInfo& i = s.names[key];
  i.type = next;
  if (!i.rec && is_session(next)) i.target = i.target.with_index(i.target.index + 1);
  return s;
}

BinderExpansion expand_binder(const Name& base, const TypeP& c) {
  BinderExpansion e;
  if (is_recursive_session(c)) {
    TypeList ts = rsdecomp(c);
    std::vector<Name> ns;
    for (std::size_t j = 0; j < ts.size(); ++j) {
      ns.push_back(base.with_index(static_cast<int>(j) + 1));
      e.params.push_back(Binder{ns.back(), ts[j]});
    }
    Name cr = rec_prop(ns[0]);
    e.server_res.emplace_back(cr, t_chan(t_lin(ts)));
    e.servers.push_back(rec_server(cr, ns));
    e.info = NameInfo{ns[0], c, true};
    return e;
  }
  TypeList ts = gdecomp(c);
  for (std::size_t j = 0; j < ts.size(); ++j) e.params.push_back(Binder{base.with_index(static_cast<int>(j) + 1), ts[j]});
  e.info = NameInfo{base.with_index(1), c, false};
  return e;
}

std::vector<std::string> context_order(const BreakdownState& st, std::vector<std::string> xs) {
  auto rank = [&](const std::string& x) {
    auto it = st.rank.find(x);
    return it == st.rank.end() ? INT_MAX : it->second;
  };
  std::stable_sort(xs.begin(), xs.end(), [&](auto& a, auto& b) { return rank(a) < rank(b); });
  return xs;
}

namespace {

using State = BreakdownState;

using Expansion = BinderExpansion;

TypeList pointwise_dual(const TypeList& ts) {
  TypeList out;
  for (auto& t : ts) out.push_back(dual(t));
  return out;
}

std::vector<Arg> as_args(const std::vector<Name>& ns) { return {ns.begin(), ns.end()}; }

ProcP server(const Name& cr, const std::vector<Name>& ns) { return rec_server(cr, ns); }

class Breakdown {
public:
  std::vector<std::map<int, TypeList>> scopes{1};
  int fresh = 0;
  int bound = 0;

  Name fresh_name(const std::string& hint) { return Name{hint + "%" + std::to_string(++fresh)}; }
  std::string fresh_var(const std::string& hint) { return hint + "%" + std::to_string(++fresh); }

  const NameInfo& lookup(const State& st, const Name& n) const {
    auto it = st.names.find(n);
    if (it == st.names.end()) throw DecomposeError("no type for name " + print_name(n));
    return it->second;
  }

  TypeList ctx_types(const State& st, const std::vector<std::string>& xs) const {
    TypeList out;
    for (auto& x : xs) {
      auto it = st.vars.find(x);
      if (it == st.vars.end()) throw DecomposeError("no type for variable " + x);
      out.push_back(gdecomp_value(it->second));
    }
    return out;
  }

  static std::vector<ValP> vals(const std::vector<std::string>& xs) {
    std::vector<ValP> out;
    for (auto& x : xs) out.push_back(mk::var(x));
    return out;
  }

  static ProcP send(int j, const std::vector<std::string>& xs, ProcP cont) {
    return mk::out(prop(j, true), vals(xs), std::move(cont));
  }

  static TypeList rec_types(const NameInfo& i) { return rsdecomp(i.type); }

  static std::vector<Name> expand(const NameInfo& i) { return expand_target(i); }

  static State advance(const State& st, const Name& key, const TypeP& next) { return advance_name(st, key, next); }

  Expansion expand_binder(const Name& base, const TypeP& c) { return hodecomp::expand_binder(base, c); }

  ProcP restrict_props(int from, int count, ProcP body) {
    std::vector<std::pair<Name, TypeP>> rs;
    for (int j = from; j < from + count; ++j) {
      auto it = scopes.back().find(j);
      if (it == scopes.back().end()) throw DecomposeError("propagator " + std::to_string(j) + " never used");
      rs.emplace_back(prop(j), t_in(it->second, t_end()));
    }
    return mk::res(rs, std::move(body));
  }

  // A tuple of fresh binders for the names of a recursive session.
  std::vector<Binder> rec_binders(const NameInfo& i) {
    Name z = fresh_name("z");
    std::vector<Binder> out;
    TypeList ts = rec_types(i);
    for (std::size_t j = 0; j < ts.size(); ++j) out.push_back(Binder{z.with_index(static_cast<int>(j) + 1), ts[j]});
    return out;
  }

  static std::vector<Name> binder_names(const std::vector<Binder>& bs) {
    std::vector<Name> out;
    for (auto& b : bs) out.push_back(b.name);
    return out;
  }

  ValP value(const State& st, const ValP& v) {
    if (as<VarV>(v) || as<Lit>(v)) return v;
    if (as<NameV>(v)) throw DecomposeError("name payload in a higher-order term");
    const AbsV& a = std::get<AbsV>(v->v);
    State s = st;
    std::vector<Binder> params;
    std::vector<std::pair<Name, TypeP>> server_res;
    std::vector<ProcP> parts;
    for (auto& b : a.params) {
      if (!b.type) throw DecomposeError("abstraction binder " + print_name(b.name) + " lacks a type");
      Expansion e = expand_binder(b.name, b.type);
      params.insert(params.end(), e.params.begin(), e.params.end());
      server_res.insert(server_res.end(), e.server_res.begin(), e.server_res.end());
      parts.insert(parts.end(), e.servers.begin(), e.servers.end());
      s.names[b.name] = e.info;
    }
    bool shared = a.lin == Lin::sh;
    if (shared) scopes.emplace_back();
    parts.push_back(send(st.k, st.ctx, mk::nil()));
    parts.push_back(proc(s, a.body));
    ProcP body = mk::res(server_res, mk::par(parts));
    if (shared) {
      body = restrict_props(st.k, degree(a.body), body);
      scopes.pop_back();
    }
    return mk::abs(params, a.lin, body);
  }

  ProcP proc(const State& st, const ProcP& p) {
    scopes.back()[st.k] = ctx_types(st, st.ctx);
    const int k = st.k;
    return std::visit(
        [&](auto&& x) -> ProcP {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Output>) {
            const NameInfo inf = lookup(st, x.subj);
            State after = st;
            if (is_session(inf.type)) {
              TypeP t = unfold_head(inf.type);
              if (t->kind != TKind::Out) throw DecomposeError("output on " + print_name(x.subj) + " at type " + show(inf.type));
              after = advance(st, x.subj, t->next);
            }
            std::vector<std::string> z = context_order(st, free_vars(x.cont));
            int kk = k + 1;
            std::vector<ValP> payload;
            for (auto& v : x.payload) {
              State vs = after;
              vs.k = kk;
              vs.ctx = context_order(after, free_vars(v));
              payload.push_back(value(vs, v));
              kk += degree_val(v);
            }
            const int kn = kk;
            State qs = after;
            qs.k = kn;
            qs.ctx = z;
            ProcP trio;
            if (inf.rec) {
              auto zs = rec_binders(inf);
              auto zn = binder_names(zs);
              Name cr = rec_prop(inf.target);
              ProcP body = mk::out(zn[findex(inf.type) - 1], payload, send(kn, z, server(cr, zn)));
              trio = mk::in(prop(k), st.ctx, mk::out(cr, {mk::abs(zs, Lin::lin, body)}, mk::nil()));
            } else {
              trio = mk::in(prop(k), st.ctx, mk::out(inf.target, payload, send(kn, z, mk::nil())));
            }
            return mk::par(trio, proc(qs, x.cont));
          } else if constexpr (std::is_same_v<T, Input>) {
            const NameInfo inf = lookup(st, x.subj);
            State after = st;
            TypeList payload_types;
            if (is_session(inf.type)) {
              TypeP t = unfold_head(inf.type);
              if (t->kind != TKind::In) throw DecomposeError("input on " + print_name(x.subj) + " at type " + show(inf.type));
              after = advance(st, x.subj, t->next);
              payload_types = t->items;
            } else if (inf.type->kind == TKind::Chan) {
              payload_types = inf.type->items;
            } else {
              throw DecomposeError("input on " + print_name(x.subj) + " at type " + show(inf.type));
            }
            if (payload_types.size() != x.binders.size())
              throw DecomposeError("binder arity mismatch on " + print_name(x.subj));
            for (std::size_t i = 0; i < x.binders.size(); ++i) {
              after.vars[x.binders[i]] = payload_types[i];
              after.rank[x.binders[i]] = ++bound;
            }
            std::vector<std::string> xs = context_order(after, free_vars(x.cont));
            State qs = after;
            qs.k = k + 1;
            qs.ctx = xs;
            ProcP trio;
            if (inf.rec) {
              auto zs = rec_binders(inf);
              auto zn = binder_names(zs);
              Name cr = rec_prop(inf.target);
              ProcP body = mk::in(zn[findex(inf.type) - 1], x.binders, send(k + 1, xs, server(cr, zn)));
              trio = mk::in(prop(k), st.ctx, mk::out(cr, {mk::abs(zs, Lin::lin, body)}, mk::nil()));
            } else {
              trio = mk::in(prop(k), st.ctx, mk::in(inf.target, x.binders, send(k + 1, xs, mk::nil())));
            }
            return mk::par(trio, proc(qs, x.cont));
          } else if constexpr (std::is_same_v<T, App>) {
            ValP head = x.fun;
            if (as<AbsV>(x.fun)) {
              State vs = st;
              vs.k = k + 1;
              vs.ctx = context_order(st, free_vars(x.fun));
              head = value(vs, x.fun);
            }
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
                for (auto& n : expand(inf)) args.emplace_back(n);
              }
            }
            ProcP body = mk::app(head, args);
            for (auto it = nest.rbegin(); it != nest.rend(); ++it)
              body = mk::out(it->first, {mk::abs(it->second, Lin::lin, body)}, mk::nil());
            return mk::in(prop(k), st.ctx, body);
          } else if constexpr (std::is_same_v<T, Res>) {
            if (!x.type) throw DecomposeError("restriction of " + print_name(x.name) + " lacks a type");
            Name s = x.name.plain();
            Name sb = s.co();
            State body = st;
            if (x.type->kind == TKind::Chan) {
              body.names[s] = NameInfo{s.with_index(1), x.type, false};
              return mk::res(s.with_index(1), gdecomp(x.type)[0], proc(body, x.body));
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
              body.names[s] = NameInfo{ns[0], x.type, true};
              body.names[sb] = NameInfo{nbs[0], dual(x.type), true};
              Name cs = rec_prop(ns[0]);
              Name cb = rec_prop(nbs[0]);
              ProcP inner = mk::par({server(cs, ns), server(cb, nbs), proc(body, x.body)});
              inner = mk::res(cb, t_chan(t_lin(pointwise_dual(r))), inner);
              inner = mk::res(cs, t_chan(t_lin(r)), inner);
              return mk::res(rs, inner);
            }
            TypeList g = gdecomp(x.type);
            std::vector<std::pair<Name, TypeP>> rs;
            for (std::size_t j = 0; j < g.size(); ++j) rs.emplace_back(s.with_index(static_cast<int>(j) + 1), g[j]);
            body.names[s] = NameInfo{s.with_index(1), x.type, false};
            body.names[sb] = NameInfo{sb.with_index(1), dual(x.type), false};
            return mk::res(rs, proc(body, x.body));
          } else if constexpr (std::is_same_v<T, Par>) {
            auto y = context_order(st, free_vars(x.left));
            auto z = context_order(st, free_vars(x.right));
            const int l = degree(x.left);
            ProcP trio = mk::in(prop(k), st.ctx, send(k + 1, y, send(k + l + 1, z, mk::nil())));
            State qs = st, rs = st;
            qs.k = k + 1;
            qs.ctx = y;
            rs.k = k + l + 1;
            rs.ctx = z;
            ProcP q = proc(qs, x.left);
            ProcP r = proc(rs, x.right);
            return mk::par({trio, q, r});
          } else if constexpr (std::is_same_v<T, Inact>) {
            return mk::in(prop(k), st.ctx, mk::nil());
          } else if constexpr (std::is_same_v<T, Branch>) {
            const NameInfo inf = lookup(st, x.subj);
            if (inf.rec) throw DecomposeError("branching on a recursive session " + print_name(x.subj));
            TypeP t = unfold_head(inf.type);
            if (t->kind != TKind::Bra) throw DecomposeError("branching on " + print_name(x.subj) + " at type " + show(inf.type));
            std::vector<std::pair<std::string, ProcP>> cases;
            for (auto& [l, pj] : x.cases) {
              auto lt = std::find_if(t->labels.begin(), t->labels.end(), [&](auto& m) { return m.first == l; });
              if (lt == t->labels.end()) throw DecomposeError("label " + l + " not in " + show(inf.type));
              Expansion e = expand_binder(fresh_name("y"), lt->second);
              State sj = st;
              sj.names[x.subj] = e.info;
              sj.k = k + 1;
              scopes.emplace_back();
              std::vector<ProcP> parts = e.servers;
              parts.push_back(send(k + 1, st.ctx, mk::nil()));
              parts.push_back(proc(sj, pj));
              ProcP body = restrict_props(k + 1, degree(pj), mk::res(e.server_res, mk::par(parts)));
              scopes.pop_back();
              cases.emplace_back(l, mk::out(inf.target, {mk::abs(e.params, Lin::lin, body)}, mk::nil()));
            }
            return mk::in(prop(k), st.ctx, mk::bra(inf.target, cases));
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
            std::string z = fresh_var("z");
            std::vector<Arg> yargs;
            for (auto& b : ys) yargs.emplace_back(b.name);
            ProcP mbody = mk::sel(inf.target, x.label,
                                  mk::in(inf.target, {z}, send(k + 2, st.ctx, mk::app(mk::var(z), yargs))));
            ValP m = mk::abs(ys, Lin::lin, mbody);
            scopes.back()[k + 1] = {t_lin(ds)};
            State cs = st;
            cs.names[x.subj] = NameInfo{mine[0], sj, rec};
            cs.k = k + 2;
            std::vector<ProcP> parts;
            parts.push_back(mk::in(prop(k + 1), {"y"}, mk::app(mk::var("y"), as_args(other))));
            std::vector<std::pair<Name, TypeP>> srv;
            if (rec) {
              Name cr = rec_prop(mine[0]);
              parts.push_back(server(cr, mine));
              srv.emplace_back(cr, t_chan(t_lin(gs)));
            }
            parts.push_back(proc(cs, x.cont));
            ProcP trio = mk::in(prop(k), st.ctx, mk::out(prop(k + 1, true), {m}, mk::nil()));
            return mk::par(trio, mk::res(rs, mk::res(srv, mk::par(parts))));
          }
        },
        p->v);
  }
};

} // namespace

BreakdownState initial_state(const NameTypes& free, int k) {
  BreakdownState st;
  st.k = k;
  for (auto& [n, t] : free) st.names[n] = NameInfo{n.with_index(1), t, is_recursive_session(t)};
  return st;
}

ProcP breakdown_proc(const BreakdownState& st, const ProcP& p) {
  Breakdown b;
  return b.proc(st, p);
}

ValP breakdown_value(const BreakdownState& st, const ValP& v) {
  Breakdown b;
  return b.value(st, v);
}

TypeEnvs source_envs(const NameTypes& free) {
  return envs_from_decls(std::vector<std::pair<Name, TypeP>>(free.begin(), free.end()));
}

TypeEnvs decomposed_envs(const NameTypes& free) {
  std::vector<std::pair<Name, TypeP>> decls;
  for (auto& [n, t] : free) {
    if (is_session(t)) {
      TypeList g = is_recursive_session(t) ? rsdecomp(t) : gdecomp(t);
      for (std::size_t j = 0; j < g.size(); ++j) decls.emplace_back(n.with_index(static_cast<int>(j) + 1), g[j]);
    } else {
      decls.emplace_back(n.with_index(1), gdecomp(t)[0]);
    }
  }
  return envs_from_decls(decls);
}

Decomposition decompose(const ProcP& p, const NameTypes& free, int k) {
  if (!free_vars(p).empty()) throw DecomposeError("open process: free variable " + free_vars(p).front());
  for (auto& n : free_names(p))
    if (!free.count(n)) throw DecomposeError("no type for free name " + print_name(n));
  CheckResult cr = check_process(source_envs(free), p);
  if (!cr.ok) throw DecomposeError("source does not typecheck: " + to_string(cr.diagnostics.front()));

  Breakdown b;
  BreakdownState st = initial_state(free, k);
  ProcP body = b.proc(st, p);

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
    parts.push_back(server(c, ns));
  }
  parts.push_back(Breakdown::send(k, {}, mk::nil()));
  parts.push_back(body);
  const int n = degree(p);
  for (int j = k; j < k + n; ++j) d.propagators.push_back(prop(j));
  d.term = b.restrict_props(k, n, mk::res(rec_res, mk::par(parts)));
  d.envs = decomposed_envs(free);
  return d;
}

} // namespace hodecomp
