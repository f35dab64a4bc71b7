#include "hodecomp/semantics.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <unordered_map>

#include "json.hpp"

#include "hodecomp/syntax.hpp"

namespace hodecomp {

namespace {

using NameKey = std::pair<std::string, int>;

NameKey key_of(const Name& n) { return {n.base, n.index}; }

struct Thread {
  ProcP p;
  int birth = 0;
};

// A process as restrictions over a flat parallel composition.
struct Soup {
  std::vector<std::pair<Name, TypeP>> res;
  std::vector<Thread> threads;
  std::set<NameKey> used;
  std::set<NameKey> shared;
  int fresh = 0;

  bool restricted(const Name& n) const {
    for (auto& r : res)
      if (key_of(r.first) == key_of(n)) return true;
    return false;
  }
  bool is_shared(const Name& n) const { return n.shared || n.rec_propagator() || shared.count(key_of(n)); }
  bool partners(const Name& a, const Name& b) const {
    if (key_of(a) != key_of(b)) return false;
    return is_shared(a) || a.dual != b.dual;
  }

  void flatten(const ProcP& p, int birth, std::vector<Thread>& out) {
    if (auto x = as<Par>(p)) {
      flatten(x->left, birth, out);
      flatten(x->right, birth, out);
      return;
    }
    if (as<Inact>(p)) return;
    if (auto x = as<Res>(p)) {
      Name n = x->name.plain();
      bool sh = n.shared || (x->type && x->type->kind == TKind::Chan);
      Name m = n;
      m.shared = sh;
      while (used.count(key_of(m))) m.base = n.base + "%" + std::to_string(++fresh);
      used.insert(key_of(m));
      if (sh) shared.insert(key_of(m));
      ProcP body = x->body;
      if (m.base != n.base || m.shared != n.shared) {
        Subst s;
        s.names[n] = m;
        if (!n.shared) s.names[n.co()] = sh ? m : m.co();
        body = substitute(body, s);
      }
      res.emplace_back(m, x->type);
      flatten(body, birth, out);
      return;
    }
    out.push_back({p, birth});
  }

  void load(const ProcP& p) {
    for (auto& n : free_names(p)) {
      used.insert(key_of(n));
      if (n.shared) shared.insert(key_of(n));
    }
    flatten(p, 0, threads);
  }

  ProcP term() const {
    std::vector<ProcP> ps;
    for (auto& t : threads) ps.push_back(t.p);
    return mk::res(res, mk::par(ps));
  }

  void replace(std::size_t i, const ProcP& p, int birth) {
    std::vector<Thread> out;
    flatten(p, birth, out);
    threads.erase(threads.begin() + static_cast<std::ptrdiff_t>(i));
    threads.insert(threads.begin() + static_cast<std::ptrdiff_t>(i), out.begin(), out.end());
  }

  // The annotation of a restricted session follows its plain endpoint.
  void advance(const Name& n, const std::string* label) {
    for (auto& r : res) {
      if (key_of(r.first) != key_of(n) || !r.second || !is_session(r.second)) continue;
      TypeP t = unfold_head(r.second);
      if ((t->kind == TKind::Out || t->kind == TKind::In) && !label) {
        r.second = t->next;
      } else if ((t->kind == TKind::Sel || t->kind == TKind::Bra) && label) {
        for (auto& [l, s] : t->labels)
          if (l == *label) r.second = s;
      }
    }
  }
};

struct Cand {
  Rule rule;
  std::size_t i, j; // j == i for App
};

std::vector<Cand> candidates(const Soup& s) {
  std::vector<Cand> out;
  auto& th = s.threads;
  for (std::size_t i = 0; i < th.size(); ++i) {
    const ProcP& p = th[i].p;
    if (auto a = as<App>(p)) {
      if (auto f = as<AbsV>(a->fun); f && f->params.size() == a->args.size()) out.push_back({Rule::App, i, i});
    } else if (auto o = as<Output>(p)) {
      for (std::size_t j = 0; j < th.size(); ++j) {
        auto in = as<Input>(th[j].p);
        if (j != i && in && in->binders.size() == o->payload.size() && s.partners(o->subj, in->subj))
          out.push_back({Rule::Pass, i, j});
      }
    } else if (auto sl = as<Select>(p)) {
      for (std::size_t j = 0; j < th.size(); ++j) {
        auto b = as<Branch>(th[j].p);
        if (j == i || !b || !s.partners(sl->subj, b->subj)) continue;
        for (auto& c : b->cases)
          if (c.first == sl->label) {
            out.push_back({Rule::Sel, i, j});
            break;
          }
      }
    }
  }
  return out;
}

Name binder_name(const std::string& x) { return Name{x, 0, false, false}; }

Redex fire(Soup& s, const Cand& c, int birth) {
  Redex r;
  r.rule = c.rule;
  r.path = {std::min(c.i, c.j), std::max(c.i, c.j)};
  if (c.i == c.j) r.path.pop_back();
  if (c.rule == Rule::App) {
    auto a = as<App>(s.threads[c.i].p);
    auto f = as<AbsV>(a->fun);
    Subst sub;
    for (std::size_t k = 0; k < f->params.size(); ++k) {
      Name pn = f->params[k].name.plain();
      const Arg& arg = a->args[k];
      sub.names[pn] = arg;
      if (auto n = std::get_if<Name>(&arg)) {
        if (!pn.shared && !s.is_shared(*n)) sub.names[pn.co()] = n->co();
        r.participants.push_back(print_name(*n));
      }
    }
    s.replace(c.i, substitute(f->body, sub), birth);
    return r;
  }
  if (c.rule == Rule::Pass) {
    auto o = as<Output>(s.threads[c.i].p);
    auto in = as<Input>(s.threads[c.j].p);
    Subst sub;
    for (std::size_t k = 0; k < in->binders.size(); ++k) {
      const std::string& x = in->binders[k];
      const ValP& v = o->payload[k];
      sub.vars[x] = v;
      if (auto l = as<Lit>(v)) sub.names[binder_name(x)] = *l;
      if (auto n = as<NameV>(v)) {
        sub.names[binder_name(x)] = n->name;
        if (!s.is_shared(n->name)) sub.names[binder_name(x).co()] = n->name.co();
      }
    }
    r.participants.push_back(print_name(o->subj));
    r.participants.push_back(print_name(in->subj));
    ProcP oc = o->cont;
    ProcP ic = substitute(in->cont, sub);
    Name subj = o->subj;
    if (c.j > c.i) {
      s.replace(c.j, ic, birth);
      s.replace(c.i, oc, birth);
    } else {
      s.replace(c.i, oc, birth);
      s.replace(c.j, ic, birth);
    }
    if (!s.is_shared(subj)) s.advance(subj, nullptr);
    return r;
  }
  auto sl = as<Select>(s.threads[c.i].p);
  auto b = as<Branch>(s.threads[c.j].p);
  ProcP bc;
  for (auto& cs : b->cases)
    if (cs.first == sl->label) bc = cs.second;
  r.participants.push_back(print_name(sl->subj));
  r.participants.push_back(sl->label);
  ProcP sc = sl->cont;
  Name subj = sl->subj;
  std::string label = sl->label;
  if (c.j > c.i) {
    s.replace(c.j, bc, birth);
    s.replace(c.i, sc, birth);
  } else {
    s.replace(c.i, sc, birth);
    s.replace(c.j, bc, birth);
  }
  s.advance(subj, &label);
  return r;
}

// Most recently enabled first; ties go to the rightmost participant.
std::size_t choose(const Soup& s, const std::vector<Cand>& cs) {
  std::size_t best = 0;
  auto rank = [&](const Cand& c) {
    int enabled = std::max(s.threads[c.i].birth, s.threads[c.j].birth);
    return std::make_tuple(enabled, std::max(c.i, c.j), std::min(c.i, c.j));
  };
  for (std::size_t k = 1; k < cs.size(); ++k)
    if (rank(cs[k]) > rank(cs[best])) best = k;
  return best;
}

bool inert_soup(const Soup& s) {
  if (!candidates(s).empty()) return false;
  for (auto& t : s.threads) {
    if (auto in = as<Input>(t.p)) {
      if (!s.restricted(in->subj)) return false;
    } else if (auto b = as<Branch>(t.p)) {
      if (!s.restricted(b->subj)) return false;
    } else {
      return false;
    }
  }
  return true;
}

ProcP norm(const ProcP& p);

ValP norm_val(const ValP& v) {
  if (auto a = as<AbsV>(v)) return mk::abs(a->params, a->lin, norm(a->body));
  return v;
}

ProcP norm_thread(const ProcP& p) {
  if (auto x = as<Output>(p)) {
    std::vector<ValP> pay;
    for (auto& v : x->payload) pay.push_back(norm_val(v));
    return mk::out(x->subj, std::move(pay), norm(x->cont));
  }
  if (auto x = as<Input>(p)) return mk::in(x->subj, x->binders, norm(x->cont));
  if (auto x = as<Select>(p)) return mk::sel(x->subj, x->label, norm(x->cont));
  if (auto x = as<Branch>(p)) {
    std::vector<std::pair<std::string, ProcP>> cs;
    for (auto& c : x->cases) cs.emplace_back(c.first, norm(c.second));
    return mk::bra(x->subj, std::move(cs));
  }
  if (auto x = as<App>(p)) return mk::app(norm_val(x->fun), x->args);
  return p;
}

ProcP norm(const ProcP& p) {
  Soup s;
  s.load(p);
  std::vector<ProcP> ths;
  for (auto& t : s.threads) ths.push_back(norm_thread(t.p));

  std::set<NameKey> live;
  for (auto& t : ths)
    for (auto& n : free_names(t)) live.insert(key_of(n));
  std::vector<std::pair<Name, TypeP>> res;
  for (auto& r : s.res)
    if (live.count(key_of(r.first))) res.push_back(r);

  // Sort on keys that forget which restricted name is which and its
  // polarity. Names start with one colour and are refined by the keys of the
  // threads they occur in until the partition is stable.
  std::vector<std::set<NameKey>> mentions;
  for (auto& t : ths) {
    std::set<NameKey> m;
    for (auto& n : free_names(t)) m.insert(key_of(n));
    mentions.push_back(std::move(m));
  }
  std::map<NameKey, std::size_t> colour;
  for (auto& r : res) colour[key_of(r.first)] = 0;
  auto anon_with = [&](const NameKey* marked) {
    Subst sub;
    for (auto& r : res) {
      NameKey k = key_of(r.first);
      std::string base = marked && *marked == k ? "%*" : "%" + std::to_string(colour[k]);
      sub.names[r.first] = Name{base, 0, false, false};
      if (!s.is_shared(r.first)) sub.names[r.first.co()] = Name{base, 0, false, false};
    }
    return sub;
  };
  auto thread_keys = [&](const Subst& sub) {
    std::vector<std::string> ks;
    for (auto& t : ths) ks.push_back(structural_key(canonical_rename(substitute(t, sub))));
    return ks;
  };
  std::vector<std::string> keys = thread_keys(anon_with(nullptr));
  auto has_ties = [&] {
    std::vector<std::string> sorted = keys;
    std::sort(sorted.begin(), sorted.end());
    return std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
  };
  for (std::size_t classes = 1, round = 0; has_ties() && round <= res.size(); ++round) {
    std::map<NameKey, std::string> profile;
    for (auto& r : res) {
      NameKey k = key_of(r.first);
      Subst sub = anon_with(&k);
      std::vector<std::string> occ;
      for (std::size_t i = 0; i < ths.size(); ++i)
        if (mentions[i].count(k)) occ.push_back(structural_key(canonical_rename(substitute(ths[i], sub))));
      std::sort(occ.begin(), occ.end());
      std::string pr = std::to_string(colour[k]);
      for (auto& o : occ) pr += "\x1f" + o;
      profile[k] = std::move(pr);
    }
    std::set<std::string> distinct;
    for (auto& [k, pr] : profile) distinct.insert(pr);
    if (distinct.size() == classes) break;
    classes = distinct.size();
    std::vector<std::string> order(distinct.begin(), distinct.end());
    for (auto& [k, pr] : profile)
      colour[k] = static_cast<std::size_t>(std::lower_bound(order.begin(), order.end(), pr) - order.begin());
    keys = thread_keys(anon_with(nullptr));
  }
  std::vector<std::pair<std::string, ProcP>> keyed;
  for (std::size_t i = 0; i < ths.size(); ++i) keyed.emplace_back(keys[i], ths[i]);
  std::stable_sort(keyed.begin(), keyed.end(), [](auto& a, auto& b) { return a.first < b.first; });
  ths.clear();
  for (auto& k : keyed) ths.push_back(k.second);

  // Restrictions in order of first occurrence.
  std::vector<std::pair<Name, TypeP>> ordered;
  std::set<NameKey> placed;
  for (auto& t : ths)
    for (auto& n : free_names(t)) {
      if (placed.count(key_of(n))) continue;
      for (auto& r : res)
        if (key_of(r.first) == key_of(n)) {
          ordered.push_back(r);
          placed.insert(key_of(n));
        }
    }
  return mk::res(ordered, mk::par(ths));
}

} // namespace

ProcP normalize(const ProcP& p) { return norm(p); }

std::string canonical_key(const ProcP& p) { return structural_key(canonical_rename(normalize(p))); }

bool congruent(const ProcP& p, const ProcP& q) { return canonical_key(p) == canonical_key(q); }

std::vector<std::pair<Redex, ProcP>> step(const ProcP& p) {
  Soup s;
  s.load(p);
  std::vector<std::pair<Redex, ProcP>> out;
  for (auto& c : candidates(s)) {
    Soup t = s;
    Redex r = fire(t, c, 1);
    out.emplace_back(std::move(r), t.term());
  }
  return out;
}

bool is_inert(const ProcP& p) {
  Soup s;
  s.load(normalize(p));
  return inert_soup(s);
}

Exploration explore(const ProcP& p, int fuel, std::size_t max_states) {
  Exploration ex;
  std::unordered_map<std::string, std::size_t> seen;
  std::string k0 = canonical_key(p);
  ex.nodes.push_back({p, k0, 0, {}});
  seen.emplace(k0, 0);
  std::deque<std::size_t> queue{0};
  while (!queue.empty()) {
    std::size_t id = queue.front();
    queue.pop_front();
    auto succ = step(ex.nodes[id].term);
    if (succ.empty()) {
      ex.terminals.push_back(id);
      continue;
    }
    if (ex.nodes[id].depth >= fuel) {
      ex.complete = false;
      continue;
    }
    for (auto& [r, q] : succ) {
      std::string k = canonical_key(q);
      auto it = seen.find(k);
      std::size_t to;
      if (it != seen.end()) {
        to = it->second;
      } else {
        if (ex.nodes.size() >= max_states) {
          ex.complete = false;
          continue;
        }
        to = ex.nodes.size();
        ex.nodes.push_back({q, k, ex.nodes[id].depth + 1, {}});
        seen.emplace(k, to);
        queue.push_back(to);
      }
      ex.nodes[id].succ.emplace_back(r, to);
    }
  }
  std::sort(ex.terminals.begin(), ex.terminals.end(),
            [&](std::size_t a, std::size_t b) { return ex.nodes[a].key < ex.nodes[b].key; });
  return ex;
}

Trace run(const ProcP& p, Policy policy, int fuel) {
  Trace tr;
  tr.initial = p;
  if (policy == Policy::Exhaustive) {
    Exploration ex = explore(p, fuel);
    bool all_inert = true;
    for (auto id : ex.terminals) {
      tr.terminals.push_back(ex.nodes[id].term);
      if (!is_inert(ex.nodes[id].term)) all_inert = false;
    }
    tr.terminal = !ex.complete ? Terminal::FuelExhausted : all_inert ? Terminal::Inert : Terminal::Stuck;
    tr.final = tr.terminals.size() == 1 ? tr.terminals.front() : nullptr;
    return tr;
  }
  Soup s;
  s.load(p);
  for (int i = 1;; ++i) {
    auto cs = candidates(s);
    if (cs.empty()) {
      tr.terminal = inert_soup(s) ? Terminal::Inert : Terminal::Stuck;
      break;
    }
    if (i > fuel) {
      tr.terminal = Terminal::FuelExhausted;
      break;
    }
    Redex r = fire(s, cs[choose(s, cs)], i);
    tr.steps.push_back({i, std::move(r), s.term()});
  }
  tr.final = s.term();
  return tr;
}

std::vector<TypeEnvs> envs_after_step(const TypeEnvs& envs) {
  std::vector<TypeEnvs> out{envs};
  SessionEnv se;
  for (auto& [n, t] : envs.delta) se.push_back({print_name(n), n.base, n.index, n.dual, t});
  for (auto& next : env_step(se)) {
    TypeEnvs e = envs;
    e.delta.clear();
    for (auto& en : next) e.delta[Name{en.base, en.index, en.dual, false}] = en.type;
    out.push_back(std::move(e));
  }
  return out;
}

std::string to_string(Rule r) {
  switch (r) {
  case Rule::App: return "App";
  case Rule::Pass: return "Pass";
  case Rule::Sel: return "Sel";
  }
  return "";
}

std::string to_string(Terminal t) {
  switch (t) {
  case Terminal::Inert: return "inert";
  case Terminal::FuelExhausted: return "fuel-exhausted";
  case Terminal::Stuck: return "stuck";
  }
  return "";
}

std::string trace_jsonl(const Trace& t) {
  PrintOptions po;
  po.annotations = false;
  std::string out;
  for (auto& s : t.steps) {
    nlohmann::json j;
    j["step"] = s.index;
    j["rule"] = to_string(s.redex.rule);
    j["path"] = s.redex.path;
    j["participants"] = s.redex.participants;
    j["term"] = print(s.term, po);
    out += j.dump() + "\n";
  }
  nlohmann::json end;
  end["terminal"] = to_string(t.terminal);
  end["steps"] = t.steps.size();
  if (t.final) end["term"] = print(t.final, po);
  if (!t.terminals.empty()) {
    std::vector<std::string> ts;
    for (auto& p : t.terminals) ts.push_back(print(p, po));
    end["terminals"] = ts;
  }
  out += end.dump() + "\n";
  return out;
}

} // namespace hodecomp
